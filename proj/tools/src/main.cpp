#include <iostream>

#include "sublis_cli/cli.hpp"

int main(int argc, char** argv) { return sublis::cli::run(argc, argv, std::cout, std::cerr); }
