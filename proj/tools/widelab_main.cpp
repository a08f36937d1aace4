#include <iostream>

#include "widelab/cli.hpp"

int main(int argc, char** argv) {
  return widelab::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout,
                          std::cerr);
}
