#pragma once

#include <cstdint>
#include <random>

namespace dpw {

// mt19937_64 is bit-exact across platforms; the bounded draw below avoids
// std::uniform_int_distribution, whose output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = gen_();
        } while (v >= limit);
        return v % n;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace dpw
