#include <iostream>

#include "birthsub/cli.hpp"

int main(int argc, char** argv) { return birthsub::run_cli(argc, argv, std::cout, std::cerr); }
