#include <iostream>

#include "streampred/io_cli.hpp"

int main(int argc, char** argv) {
  return streampred::run_cli(argc, argv, std::cout, std::cerr);
}
