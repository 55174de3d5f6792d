#include "passive/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return passive::run_cli(argc, argv, std::cout, std::cerr); }
