#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace uamo {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

enum class ErrorKind { InvalidArgument, Numerical, Validation };

// Every library failure is one of these; the cli maps kind() to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string context = {})
      : std::runtime_error(message), kind_(kind), context_(std::move(context)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& context() const { return context_; }

 private:
  ErrorKind kind_;
  std::string context_;
};

inline void require(bool ok, const std::string& message, const std::string& context = {}) {
  if (!ok) throw Error(ErrorKind::InvalidArgument, message, context);
}

}  // namespace uamo
