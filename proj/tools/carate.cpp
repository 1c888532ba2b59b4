#include <iostream>

#include "carate/cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return carate::run_cli(argc, argv, std::cout, std::cerr);
}
