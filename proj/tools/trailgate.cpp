#include <iostream>

#include "trailgate/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return trailgate::run_cli(args, std::cout, std::cerr);
}
