#include <iostream>

#include <bpmc/cli.hpp>

int main(int argc, char** argv) {
    return bpmc::run_cli(argc, argv, std::cout, std::cerr);
}
