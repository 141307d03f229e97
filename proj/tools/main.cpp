#include <iostream>
#include <string>
#include <vector>

#include "csthresh/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return csthresh::cli::run(args, std::cout, std::cerr);
}
