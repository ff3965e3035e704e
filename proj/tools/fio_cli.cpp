#include <iostream>

#include "fio/cli.hpp"

int main(int argc, char** argv) {
    return fio::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
