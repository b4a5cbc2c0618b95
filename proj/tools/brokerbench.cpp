#include <iostream>

#include "brokerbench/cli.hpp"

int main(int argc, char** argv) {
  return brokerbench::cli::run_cli(argc, argv, std::cout, std::cerr);
}
