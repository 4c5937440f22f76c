#include <iostream>
#include <string>
#include <vector>

#include "gaudin/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return gaudin::cli::main_entry(args, std::cout, std::cerr);
}
