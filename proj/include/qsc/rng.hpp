#pragma once

#include <cmath>
#include <cstdint>

namespace qsc {

// splitmix64 finalizer
inline uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Counter-based generator (the splitmix64 sequence): out(i) depends only on
// (seed, i), so lazily extended consumers reproduce identical values no
// matter the order or thread they are driven from.
class RandomStream {
  public:
    explicit RandomStream(uint64_t seed) : seed_(seed) {}
    uint64_t at(uint64_t i) const { return mix64(seed_ + (i + 1) * 0x9E3779B97F4A7C15ull); }
    double unit_at(uint64_t i) const { return double(at(i) >> 11) * 0x1.0p-53; }  // [0,1)
    uint64_t seed() const { return seed_; }

  private:
    uint64_t seed_;
};

class SeqRng {
  public:
    explicit SeqRng(uint64_t seed) : stream_(seed) {}
    uint64_t next() { return stream_.at(pos_++); }
    double unit() { return double(next() >> 11) * 0x1.0p-53; }

  private:
    RandomStream stream_;
    uint64_t pos_ = 0;
};

inline uint64_t derive_seed(uint64_t master, uint64_t tag, uint64_t index) {
    const uint64_t h = mix64(master ^ (0x9E3779B97F4A7C15ull * (tag + 1)));
    return mix64(h + (index + 1) * 0xD1B54A32D192ED03ull);
}

// exact Poisson(t) sample via Knuth's product method, chunked so e^{-chunk}
// never underflows for large t
inline int64_t sample_poisson(SeqRng& rng, double t) {
    int64_t n = 0;
    double remaining = t;
    while (remaining > 0) {
        const double chunk = remaining > 500.0 ? 500.0 : remaining;
        const double floor_p = std::exp(-chunk);
        double prod = 1.0;
        int64_t k = 0;
        do {
            prod *= rng.unit();
            ++k;
        } while (prod > floor_p);
        n += k - 1;
        remaining -= chunk;
    }
    return n;
}

}  // namespace qsc
