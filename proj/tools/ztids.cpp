#include <iostream>

#include "ztids/cli.hpp"

int main(int argc, char** argv) { return ztids::cli::run(argc, argv, std::cout, std::cerr); }
