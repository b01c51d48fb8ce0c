#include <iostream>

#include "hyperfit/cli.hpp"

int main(int argc, char** argv) { return hyperfit::run_cli(argc, argv, std::cout, std::cerr); }
