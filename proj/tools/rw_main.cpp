#include <iostream>

#include "rw/cli.hpp"

int main(int argc, char** argv) { return rw::run_cli(argc, argv, std::cout, std::cerr); }
