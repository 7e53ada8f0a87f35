// Writes a one-column CSV of seeded draws, used for the checked-in fixtures:
//   make-fixture normal 200 20261015 > tests/data/normal_200.csv
//   make-fixture laplace 500 20261016 > tests/data/laplace_500.csv

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

#include "ratio_convexity/random.hpp"

int main(int argc, char** argv) {
    if (argc != 4) {
        std::cerr << "usage: make-fixture <normal|laplace> <count> <seed>\n";
        return 2;
    }
    const std::string kind = argv[1];
    const auto count = std::stoull(argv[2]);
    const std::uint64_t seed = std::stoull(argv[3]);
    ratio_convexity::NormalSource normal(seed);
    ratio_convexity::SplitMix64 uniform(seed);
    std::printf("x\n");
    for (unsigned long long i = 0; i < count; ++i) {
        double v = 0.0;
        if (kind == "normal") v = normal();
        else if (kind == "laplace") v = ratio_convexity::laplace_deviate(uniform);
        else {
            std::cerr << "unknown kind '" << kind << "'\n";
            return 2;
        }
        std::printf("%.17g\n", v);
    }
    return 0;
}
