#include <iostream>
#include <string>
#include <vector>

#include "cprob/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cprob::cli::run(args, std::cout, std::cerr);
}
