#include <iostream>

#include "fineq/cli/command.hpp"

int main(int argc, char** argv) { return fineq::cli::main_entry(argc, argv, std::cout, std::cerr); }
