#include <iostream>

#include "opk/cli.hpp"

int main(int argc, char** argv) { return opk::run_cli(argc, argv, std::cout, std::cerr); }
