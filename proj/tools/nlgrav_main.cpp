#include <iostream>

#include "nlgrav/cli.hpp"

int main(int argc, char** argv) { return nlgrav::cli::run(argc, argv, std::cout, std::cerr); }
