#include <iostream>

#include "torsion/cli.hpp"

int main(int argc, char** argv) {
  return torsion::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
