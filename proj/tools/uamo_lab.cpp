#include <iostream>

#include "uamo/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return uamo::cli::run_cli(args, std::cout, std::cerr);
}
