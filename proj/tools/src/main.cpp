#include <iostream>
#include <string>
#include <vector>

#include "selectlik_cli/cli.hpp"

int main(int argc, char** argv) {
  return selectlik::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
