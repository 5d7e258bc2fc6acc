#include <iostream>
#include <string>
#include <vector>

#include "momentlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return momentlab::cli::run(args, std::cout, std::cerr);
}
