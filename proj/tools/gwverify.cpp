#include "gwv/cli.hpp"

int main(int argc, char** argv) {
    return gwv::cli::run({argv + 1, argv + argc}, std::cin, std::cout, std::cerr);
}
