#include <iostream>

#include "coplan/cli.hpp"

int main(int argc, char** argv) { return coplan::cli::run_cli(argc, argv, std::cout, std::cerr); }
