#include <iostream>

#include "daeref/cli.hpp"

int main(int argc, char** argv) {
  return daeref::dispatch(argc, argv, std::cout, std::cerr);
}
