#include "dcqe/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return dcqe::cli::main(argc, argv, std::cout, std::cerr); }
