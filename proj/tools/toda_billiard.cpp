#include <iostream>

#include "toda/cli.hpp"

int main(int argc, char** argv) { return toda::run_cli(argc, argv, std::cout, std::cerr); }
