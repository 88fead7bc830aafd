#include "darkloop/runner.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return darkloop::cli::main_entry(std::vector<std::string>(argv, argv + argc), std::cout,
                                   std::cerr);
}
