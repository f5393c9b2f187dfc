#include <iostream>

#include "agsp/cli.hpp"

int main(int argc, char** argv) { return agsp::cli::main_entry(argc, argv, std::cout, std::cerr); }
