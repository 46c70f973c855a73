#include <iostream>

#include "wtail/cli.hpp"

int main(int argc, char** argv) { return wtail::cli::run(argc, argv, std::cout, std::cerr); }
