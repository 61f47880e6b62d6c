#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "shiftcast/rng.hpp"
#include "shiftcast/tensor.hpp"

namespace shiftcast::nn {

/// Named parameter tensors with accumulated gradient buffers.
///
/// Each parameter is initialized from an RNG child stream keyed by its own
/// name, so the set of draws a parameter sees does not depend on what other
/// parameters exist or in which order they were registered.
class ParamStore {
public:
    struct Entry {
        std::string name;
        Tensor2 value;
        Tensor2 grad;
    };

    /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) init, fan-in given explicitly.
    int add_uniform(const std::string& name, int rows, int cols, int fan_in,
                    const RngStream& root);
    int add_zeros(const std::string& name, int rows, int cols);

    int id(const std::string& name) const;
    bool has(const std::string& name) const { return index_.count(name) > 0; }

    Tensor2& value(int id) { return entries_[id].value; }
    const Tensor2& value(int id) const { return entries_[id].value; }
    Tensor2& grad(int id) { return entries_[id].grad; }
    const Tensor2& grad(int id) const { return entries_[id].grad; }
    const std::string& name(int id) const { return entries_[id].name; }

    int count() const { return static_cast<int>(entries_.size()); }
    const std::vector<Entry>& entries() const { return entries_; }

    void zero_grads();
    double grad_global_norm() const;
    void scale_grads(double factor);

    size_t total_values() const;

    /// Versioned binary blob: names, shapes, raw little-endian doubles.
    /// Round-trips values bit-exactly.
    void save(std::ostream& out) const;
    static ParamStore load(std::istream& in);

    bool values_equal(const ParamStore& other) const;

private:
    int add_entry(const std::string& name, Tensor2 value);

    std::vector<Entry> entries_;
    std::unordered_map<std::string, int> index_;
};

/// Gradient accumulation buffer aligned with a ParamStore's entries. Used by
/// the training loop to combine per-window contributions in a fixed order.
struct GradBuffer {
    std::vector<Tensor2> grads;

    explicit GradBuffer(const ParamStore& store);
    void zero();
    void add(const GradBuffer& other);
    void add_into(ParamStore& store) const;
};

}  // namespace shiftcast::nn
