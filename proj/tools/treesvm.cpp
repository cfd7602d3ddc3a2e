#include <iostream>

#include "treesvm/cli.hpp"

int main(int argc, char** argv) { return treesvm::run_cli(argc, argv, std::cout, std::cerr); }
