#include <iostream>
#include <string>
#include <vector>

#include "linat/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return linat::run(std::move(args), std::cout, std::cerr);
}
