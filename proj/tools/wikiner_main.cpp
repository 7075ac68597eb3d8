#include <iostream>

#include "wikiner/cli/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return wikiner::cli::run(args, std::cout, std::cerr);
}
