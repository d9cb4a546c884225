#include <iostream>

#include "ccnls/cli.hpp"

int main(int argc, char** argv) { return ccnls::cli::cli_dispatch(argc, argv, std::cout, std::cerr); }
