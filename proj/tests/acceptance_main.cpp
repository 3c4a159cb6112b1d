#include <cstring>
#include <iostream>

#include "nlchns/acceptance.hpp"

int main(int argc, char** argv) {
    using namespace nlchns::accept;
    Level level = Level::full;
    if (argc > 1 && std::strcmp(argv[1], "quick") == 0) level = Level::quick;
    if (argc > 1 && std::strcmp(argv[1], "full") == 0) level = Level::full;
    const auto results = run_acceptance(level, std::cout);
    return count_failures(results) == 0 ? 0 : 1;
}
