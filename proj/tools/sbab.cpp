#include <iostream>

#include "sbab/cli.hpp"

int main(int argc, char** argv) {
  return sbab::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
