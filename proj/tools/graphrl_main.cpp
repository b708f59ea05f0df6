#include <string>
#include <vector>

#include "graphrl/cli.hpp"

int main(int argc, char** argv) {
    return graphrl::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
