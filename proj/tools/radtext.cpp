#include <iostream>

#include "radtext/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return radtext::run_command(args, std::cout, std::cerr);
}
