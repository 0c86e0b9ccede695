#include <iostream>
#include <string>
#include <vector>

#include "absa/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return absa::run_command(args, std::cout, std::cerr);
}
