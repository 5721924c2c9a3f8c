#include "ddlab/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return ddlab::run_cli(argc, argv, std::cout, std::cerr); }
