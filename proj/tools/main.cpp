#include <iostream>

#include "lyapinit/cli.hpp"

int main(int argc, char** argv) { return lyapinit::cli::run(argc, argv, std::cout, std::cerr); }
