#include <iostream>

#include "lzc/app/commands.hpp"

int main(int argc, char** argv) {
  return lzc::app::run_cli(argc, argv, std::cout, std::cerr);
}
