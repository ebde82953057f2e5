#include <iostream>

#include "robust_interp/cli.hpp"

int main(int argc, char** argv) { return robust_interp::run_cli(argc, argv, std::cout, std::cerr); }
