#include <iostream>

#include "carnot/cli.hpp"

int main(int argc, char** argv) { return carnot::run_cli(argc, argv, std::cout, std::cerr); }
