#include <iostream>

#include "jdweak/cli.hpp"

int main(int argc, char** argv) { return jdweak::run_cli(argc, argv, std::cout, std::cerr); }
