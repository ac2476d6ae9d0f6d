#include <iostream>

#include "hinfdae/cli.hpp"

int main(int argc, char** argv) { return hinfdae::cli::run(argc, argv, std::cout, std::cerr); }
