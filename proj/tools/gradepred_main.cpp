#include <iostream>

#include "gradepred/cli.hpp"

int main(int argc, char** argv) {
  return gradepred::run_cli(argc, argv, std::cout, std::cerr);
}
