#include <iostream>

#include "msrelax/cli.hpp"

int main(int argc, char** argv) { return msrelax::cli::main(argc, argv, std::cout, std::cerr); }
