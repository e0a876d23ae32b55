#include "ogtt/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return ogtt::cli_main(argc, argv, std::cout, std::cerr); }
