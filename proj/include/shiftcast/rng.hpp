#pragma once

#include <cstdint>
#include <string_view>

#include "shiftcast/tensor.hpp"

namespace shiftcast::nn {

/// Counter-based random stream. A draw is a pure function of (seed, counter),
/// so streams can be copied, replayed, and split into independent child
/// streams keyed by a label without any shared state.
class RngStream {
public:
    RngStream() = default;
    explicit RngStream(uint64_t seed, uint64_t counter = 0) : seed_(seed), counter_(counter) {}

    /// Independent stream derived from (seed, label). Children with distinct
    /// labels never overlap; the parent stream is left untouched.
    RngStream child(std::string_view label) const;
    RngStream child(uint64_t label) const;

    uint64_t next_u64();
    /// Uniform in [0, 1).
    double uniform01();
    /// Uniform in (0, 1), clamped to [1e-12, 1 - 1e-12].
    double uniform_open01();
    double uniform(double lo, double hi);
    /// Standard normal via Box-Muller; consumes two raw draws.
    double normal();
    /// Gumbel(0,1) = -log(-log(u)).
    double gumbel();

    uint64_t seed() const { return seed_; }
    uint64_t counter() const { return counter_; }

private:
    uint64_t seed_ = 0;
    uint64_t counter_ = 0;
};

}  // namespace shiftcast::nn
