#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return sphens::cli::run_cli(argc, argv, std::cout, std::cerr); }
