// main.cpp: heatrect command-line entry point

#include <iostream>
#include <string>
#include <vector>

#include "heatrect/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return heatrect::run_cli(args, std::cout, std::cerr);
}
