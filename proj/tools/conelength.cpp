#include <iostream>

#include <conelength/cli.hpp>

int main(int argc, char** argv) { return conelength::cli::run(argc, argv, std::cout, std::cerr); }
