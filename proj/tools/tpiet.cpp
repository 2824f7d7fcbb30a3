#include <tpiet/cli.hpp>

#include <iostream>

int main(int argc, char** argv) {
    return tpiet::run_cli(argc, argv, std::cin, std::cout, std::cerr);
}
