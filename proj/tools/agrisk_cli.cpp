#include <iostream>

#include "agrisk/cli.hpp"

int main(int argc, char** argv) { return agrisk::cli::run(argc, argv, std::cout, std::cerr); }
