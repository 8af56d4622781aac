#include <iostream>
#include <string>
#include <vector>

#include "ncet/cli.hpp"

int main(int argc, char** argv) {
  return ncet::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
