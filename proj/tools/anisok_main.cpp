#include <iostream>

#include "anisok/cli.hpp"

int main(int argc, char** argv) {
    return anisok::cli::run(argc, argv, std::cout, std::cerr);
}
