#include <iostream>

#include "percovor/cli.hpp"

int main(int argc, char** argv) { return percovor::cli::main_entry(argc, argv, std::cout, std::cerr); }
