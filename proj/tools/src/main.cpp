#include <iostream>

#include "melseg_cli/app.hpp"

int main(int argc, char** argv) {
  return melseg::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
