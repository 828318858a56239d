#include <iostream>
#include <string>
#include <vector>

#include "qmuse/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return qmuse::cli::run(args, std::cin, std::cout, std::cerr);
}
