#include <string>
#include <vector>

#include "dvn/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dvn::cli_run(args);
}
