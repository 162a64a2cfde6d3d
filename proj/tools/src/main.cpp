#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
    return egrowth::cli::run_cli({argv, argv + argc}, std::cout, std::cerr);
}
