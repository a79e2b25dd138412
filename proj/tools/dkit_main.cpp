#include <iostream>
#include <string>
#include <vector>

#include "dkit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return dkit::cli::run(args, std::cout, std::cerr);
}
