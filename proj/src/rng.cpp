#include "shiftcast/rng.hpp"

#include <cmath>
#include <numbers>

namespace shiftcast::nn {

namespace {

// SplitMix64 finalizer. One application per draw keeps streams stateless
// functions of (seed, counter).
uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

uint64_t hash_bytes(uint64_t h, std::string_view s) {
    // FNV-1a folded through mix64 for avalanche
    for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ull;
    return mix64(h);
}

}  // namespace

RngStream RngStream::child(std::string_view label) const {
    return RngStream(hash_bytes(seed_ ^ 0xa5a5a5a5deadbeefull, label));
}

RngStream RngStream::child(uint64_t label) const {
    return RngStream(mix64(seed_ ^ mix64(label ^ 0x517cc1b727220a95ull)));
}

uint64_t RngStream::next_u64() { return mix64(seed_ ^ mix64(counter_++)); }

double RngStream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open01() {
    double u = uniform01();
    if (u < 1e-12) u = 1e-12;
    if (u > 1.0 - 1e-12) u = 1.0 - 1e-12;
    return u;
}

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

double RngStream::normal() {
    // Box-Muller, no caching; u1 in (0,1] so the log is finite
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RngStream::gumbel() { return -std::log(-std::log(uniform_open01())); }

}  // namespace shiftcast::nn
