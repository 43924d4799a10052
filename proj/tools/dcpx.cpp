#include <iostream>

#include "dcpx/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dcpx::run_cli(args, std::cout, std::cerr);
}
