#include <iostream>

#include "sevrank/cli.hpp"

int main(int argc, char** argv) {
  return sevrank::cli::run(argc, argv, std::cout, std::cerr);
}
