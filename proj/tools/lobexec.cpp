#include "lobexec/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return lobexec::run_cli(argc, argv, std::cout, std::cerr);
}
