#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  return tactile_rl::cli::run(argc, argv, std::cout, std::cerr);
}
