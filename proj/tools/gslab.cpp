#include <string>
#include <vector>

#include "gslab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return gslab::cli_main(args);
}
