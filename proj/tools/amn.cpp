#include <iostream>

#include "amn/cli.hpp"

int main(int argc, char** argv) {
    return amn::cli_main(argc, argv, std::cout, std::cerr);
}
