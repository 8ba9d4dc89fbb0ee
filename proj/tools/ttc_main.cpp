#include <iostream>

#include "ttc/cli.hpp"

int main(int argc, char** argv) { return ttc::cli::dispatch(argc, argv, std::cout, std::cerr); }
