// Counter-based random streams for reproducible parallel Monte-Carlo runs.
//
// A stream is keyed by (master_seed, snr_index, block_index, consumer_tag)
// and generates values by finalizing key + counter through the splitmix64
// mixer. Any block's stream can therefore be created independently on any
// worker, making results independent of scheduling.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace csim {

namespace detail {

inline uint64_t mix64(uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

inline uint64_t absorb(uint64_t h, uint64_t x) {
    return mix64(h ^ mix64(x + 0x9e3779b97f4a7c15ULL));
}

} // namespace detail

enum class StreamTag : uint64_t { payload_bits = 1, channel = 2, noise = 3 };

class RandomStream {
public:
    RandomStream(uint64_t master_seed, uint64_t snr_index, uint64_t block_index, StreamTag tag) {
        uint64_t h = detail::mix64(master_seed + 0x243f6a8885a308d3ULL);
        h = detail::absorb(h, snr_index);
        h = detail::absorb(h, block_index);
        h = detail::absorb(h, static_cast<uint64_t>(tag));
        key_ = h;
    }

    uint64_t next_u64() {
        counter_ += 0x9e3779b97f4a7c15ULL;
        return detail::mix64(key_ + counter_);
    }

    // uniform on (0, 1]
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // standard normal via Box-Muller; second value cached
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    // circularly symmetric complex Gaussian with unit variance
    std::complex<double> next_cn() {
        const double s = 0.70710678118654752440; // sqrt(1/2)
        const double re = next_gaussian();
        const double im = next_gaussian();
        return {s * re, s * im};
    }

private:
    uint64_t key_ = 0;
    uint64_t counter_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// FNV-1a over raw bytes, used for content digests of specs and realizations.
class Fnv1a {
public:
    void absorb_bytes(const void* p, size_t n) {
        const unsigned char* b = static_cast<const unsigned char*>(p);
        for (size_t i = 0; i < n; ++i) {
            h_ ^= b[i];
            h_ *= 0x100000001b3ULL;
        }
    }
    void absorb_u64(uint64_t v) { absorb_bytes(&v, sizeof v); }
    void absorb_double(double v) { absorb_bytes(&v, sizeof v); }
    void absorb_cd(std::complex<double> v) {
        absorb_double(v.real());
        absorb_double(v.imag());
    }
    uint64_t value() const { return h_; }

private:
    uint64_t h_ = 0xcbf29ce484222325ULL;
};

} // namespace csim
