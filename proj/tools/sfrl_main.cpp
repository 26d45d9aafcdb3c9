#include <iostream>
#include <string>
#include <vector>

#include "sfrl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return sfrl::cli::dispatch(args, std::cout, std::cerr);
}
