#include <iostream>
#include <string>
#include <vector>

#include "cforge/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cforge::dispatch(args, std::cout, std::cerr);
}
