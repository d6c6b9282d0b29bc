#include <iostream>
#include <string>
#include <vector>

#include "equipart/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return equipart::run_cli(args, std::cout, std::cerr);
}
