#include <iostream>

#include "infogent/cli.hpp"

int main(int argc, char** argv) { return infogent::run_cli(argc, argv, std::cout, std::cerr); }
