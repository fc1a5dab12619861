#include <iostream>

#include "vlens/commands.hpp"

int main(int argc, char** argv) { return vlens::run_cli(argc, argv, std::cout, std::cerr); }
