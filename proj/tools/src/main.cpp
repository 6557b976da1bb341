#include <iostream>

#include "zcurve/cli.hpp"

int main(int argc, char** argv) { return zcurve::cli::run(argc, argv, std::cout, std::cerr); }
