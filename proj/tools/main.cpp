#include <iostream>
#include <string>
#include <vector>

#include "archctl.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return arsip::cli::run(args, std::cout, std::cerr);
}
