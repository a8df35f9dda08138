#include <iostream>

#include "emoclass/cli.hpp"

int main(int argc, char** argv) { return emoclass::cli::run(argc, argv, std::cout, std::cerr); }
