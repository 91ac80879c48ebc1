#include <iostream>

#include "leontief/cli.hpp"

int main(int argc, char** argv) {
    return leontief::cli::run_cli(argc, argv, std::cout, std::cerr);
}
