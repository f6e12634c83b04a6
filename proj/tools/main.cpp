#include <iostream>
#include <string>
#include <vector>

#include "tron/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tron::cli::run(args, std::cout, std::cerr);
}
