#include <iostream>

#include "spherelag_cli/cli.hpp"

int main(int argc, char** argv) {
  return spherelag::cli::run(argc, argv, std::cout, std::cerr);
}
