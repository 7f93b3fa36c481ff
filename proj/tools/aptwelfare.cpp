#include <iostream>
#include <string>
#include <vector>

#include "aptwelfare/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return aptw::cli::dispatch(args, std::cout, std::cerr);
}
