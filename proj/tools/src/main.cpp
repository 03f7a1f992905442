#include <iostream>

#include "estkit_cli/cli.hpp"

int main(int argc, char** argv) {
  return estkit::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
