#include <iostream>
#include <string>
#include <vector>

#include "overlapq/report.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return overlapq::run_command(args, std::cout, std::cerr);
}
