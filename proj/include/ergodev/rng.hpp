#pragma once

#include <cstdint>
#include <random>

namespace ergodev {

// Per-trajectory stream keyed by (master seed, trajectory index). Two runs
// that ask for the same key see the same numbers whatever thread they are on.
class Rng {
public:
    Rng(std::uint64_t master_seed, std::uint64_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                          static_cast<std::uint32_t>(master_seed >> 32),
                          static_cast<std::uint32_t>(stream),
                          static_cast<std::uint32_t>(stream >> 32), 0x65726764u};
        engine_.seed(seq);
    }

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    double sign() {
        if (bits_left_ == 0) {
            bits_ = engine_();
            bits_left_ = 64;
        }
        --bits_left_;
        double s = (bits_ & 1u) ? 1.0 : -1.0;
        bits_ >>= 1;
        return s;
    }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    std::uint64_t bits_ = 0;
    int bits_left_ = 0;
};

}  // namespace ergodev
