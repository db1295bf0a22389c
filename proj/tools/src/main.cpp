#include <iostream>

#include "dps_cli/cli.hpp"

int main(int argc, char** argv) { return dps::cli::run(argc, argv, std::cout, std::cerr); }
