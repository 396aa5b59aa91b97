#pragma once

#include <cstdint>
#include <random>

namespace dvn {

// Seeded stream of uniform doubles in [0, 1).
// mt19937_64 plus an explicit 53-bit mapping, so the same seed produces
// the same draws on every platform and standard library.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace dvn
