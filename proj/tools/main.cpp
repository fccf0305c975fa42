#include <palm/cli.hpp>

#include <iostream>

int main(int argc, char** argv) {
    return palm::cli_main(argc, argv, std::cout, std::cerr);
}
