#include "shiftcast/params.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "shiftcast/errors.hpp"

namespace shiftcast::nn {

namespace {

constexpr char kMagic[4] = {'S', 'C', 'P', 'S'};
constexpr uint32_t kVersion = 1;

void write_u32(std::ostream& out, uint32_t x) {
    out.write(reinterpret_cast<const char*>(&x), sizeof(x));
}

uint32_t read_u32(std::istream& in) {
    uint32_t x = 0;
    in.read(reinterpret_cast<char*>(&x), sizeof(x));
    return x;
}

}  // namespace

int ParamStore::add_entry(const std::string& name, Tensor2 value) {
    if (index_.count(name)) fail(ErrorCode::InvalidArgument, "duplicate parameter " + name);
    Entry e;
    e.name = name;
    e.grad = Tensor2(value.rows, value.cols);
    e.value = std::move(value);
    entries_.push_back(std::move(e));
    int id = static_cast<int>(entries_.size()) - 1;
    index_[name] = id;
    return id;
}

int ParamStore::add_uniform(const std::string& name, int rows, int cols, int fan_in,
                            const RngStream& root) {
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    RngStream rng = root.child("init/" + name);
    Tensor2 t(rows, cols);
    for (double& x : t.v) x = rng.uniform(-bound, bound);
    return add_entry(name, std::move(t));
}

int ParamStore::add_zeros(const std::string& name, int rows, int cols) {
    return add_entry(name, Tensor2(rows, cols));
}

int ParamStore::id(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) fail(ErrorCode::InvalidArgument, "unknown parameter " + name);
    return it->second;
}

void ParamStore::zero_grads() {
    for (Entry& e : entries_) e.grad.fill(0.0);
}

double ParamStore::grad_global_norm() const {
    double sq = 0.0;
    for (const Entry& e : entries_)
        for (double g : e.grad.v) sq += g * g;
    return std::sqrt(sq);
}

void ParamStore::scale_grads(double factor) {
    for (Entry& e : entries_)
        for (double& g : e.grad.v) g *= factor;
}

size_t ParamStore::total_values() const {
    size_t n = 0;
    for (const Entry& e : entries_) n += e.value.size();
    return n;
}

void ParamStore::save(std::ostream& out) const {
    out.write(kMagic, 4);
    write_u32(out, kVersion);
    write_u32(out, static_cast<uint32_t>(entries_.size()));
    for (const Entry& e : entries_) {
        write_u32(out, static_cast<uint32_t>(e.name.size()));
        out.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
        write_u32(out, static_cast<uint32_t>(e.value.rows));
        write_u32(out, static_cast<uint32_t>(e.value.cols));
        out.write(reinterpret_cast<const char*>(e.value.v.data()),
                  static_cast<std::streamsize>(e.value.size() * sizeof(double)));
    }
    if (!out) fail(ErrorCode::IoError, "failed writing parameter store");
}

ParamStore ParamStore::load(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        fail(ErrorCode::IoError, "bad parameter store magic");
    uint32_t version = read_u32(in);
    if (version != kVersion)
        fail(ErrorCode::IoError, "unsupported parameter store version " + std::to_string(version));
    uint32_t count = read_u32(in);
    ParamStore store;
    for (uint32_t i = 0; i < count; ++i) {
        uint32_t len = read_u32(in);
        std::string name(len, '\0');
        in.read(name.data(), len);
        int rows = static_cast<int>(read_u32(in));
        int cols = static_cast<int>(read_u32(in));
        Tensor2 t(rows, cols);
        in.read(reinterpret_cast<char*>(t.v.data()),
                static_cast<std::streamsize>(t.size() * sizeof(double)));
        if (!in) fail(ErrorCode::IoError, "truncated parameter store");
        store.add_entry(name, std::move(t));
    }
    return store;
}

bool ParamStore::values_equal(const ParamStore& other) const {
    if (entries_.size() != other.entries_.size()) return false;
    for (size_t i = 0; i < entries_.size(); ++i) {
        const Entry& a = entries_[i];
        const Entry& b = other.entries_[i];
        if (a.name != b.name || !a.value.same_shape(b.value)) return false;
        if (std::memcmp(a.value.v.data(), b.value.v.data(),
                        a.value.size() * sizeof(double)) != 0)
            return false;
    }
    return true;
}

GradBuffer::GradBuffer(const ParamStore& store) {
    grads.reserve(store.entries().size());
    for (const auto& e : store.entries()) grads.emplace_back(e.value.rows, e.value.cols);
}

void GradBuffer::zero() {
    for (Tensor2& g : grads) g.fill(0.0);
}

void GradBuffer::add(const GradBuffer& other) {
    for (size_t i = 0; i < grads.size(); ++i) grads[i].add_scaled(other.grads[i], 1.0);
}

void GradBuffer::add_into(ParamStore& store) const {
    for (size_t i = 0; i < grads.size(); ++i)
        store.grad(static_cast<int>(i)).add_scaled(grads[i], 1.0);
}

}  // namespace shiftcast::nn
