#include <iostream>

#include "hcp/cli.hpp"

int main(int argc, char** argv) { return hcp::cli_dispatch(argc, argv, std::cout, std::cerr); }
