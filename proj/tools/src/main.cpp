#include <iostream>
#include <string>
#include <vector>

#include "charkern_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return charkern::cli::run(args, std::cout, std::cerr);
}
