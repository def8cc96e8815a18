#pragma once

// Seeded threshold-compare error generation with a counter-based 18-bit PRNG.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qdiv/gf2.hpp"

namespace qdiv {

inline constexpr std::uint32_t kPrngBits = 18;
inline constexpr std::uint32_t kThresholdOne = 1U << kPrngBits;

/// SplitMix64 output function.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-based generator: draw c of stream k is a pure function of (seed, k, c), so any
/// trial can be regenerated without replaying earlier ones.
class Prng18 {
public:
    static constexpr const char* kAlgorithm = "splitmix64-ctr-u18";
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    explicit Prng18(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t counter = 0) noexcept
        : seed_(seed), stream_(stream), counter_(counter), key_(splitmix64_mix(seed ^ splitmix64_mix(stream + kGolden))) {}

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream() const noexcept { return stream_; }
    [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

    /// Value at an absolute counter position; does not advance.
    [[nodiscard]] std::uint32_t at(std::uint64_t counter) const noexcept {
        return static_cast<std::uint32_t>(splitmix64_mix(key_ + (counter + 1) * kGolden) >> (64 - kPrngBits));
    }

    std::uint32_t next_u18() noexcept { return at(counter_++); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_;
    std::uint64_t key_;
};

/// t = round(p · 2^18); a draw u fires when u < t.
inline std::uint32_t threshold(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("threshold: probability " + std::to_string(p) + " outside [0, 1]");
    return static_cast<std::uint32_t>(std::llround(p * static_cast<double>(kThresholdOne)));
}

inline double threshold_probability(std::uint32_t t) { return static_cast<double>(t) / static_cast<double>(kThresholdOne); }

inline BitVector sample_iid(std::size_t n, std::uint32_t t, Prng18& rng) {
    if (t > kThresholdOne) throw std::invalid_argument("sample_iid: threshold exceeds 2^18");
    BitVector e(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (rng.next_u18() < t) e.set_unchecked(j);
    }
    return e;
}

/// One draw per entry of `thresholds`, in order.
inline BitVector sample_thresholds(std::span<const std::uint32_t> thresholds, Prng18& rng) {
    BitVector e(thresholds.size());
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
        if (rng.next_u18() < thresholds[j]) e.set_unchecked(j);
    }
    return e;
}

inline std::vector<std::uint32_t> thresholds_for(std::span<const double> probs) {
    std::vector<std::uint32_t> t(probs.size());
    for (std::size_t j = 0; j < probs.size(); ++j) t[j] = threshold(probs[j]);
    return t;
}

struct DemSample {
    BitVector mechanisms;
    BitVector detectors;
    BitVector observables;
};

/// Fires each mechanism independently, then projects onto detectors (H) and observables (O).
inline DemSample sample_dem(const SparseBitMatrix& h, const SparseBitMatrix& o, std::span<const std::uint32_t> thresholds, Prng18& rng) {
    if (h.cols() != thresholds.size() || o.cols() != thresholds.size()) throw std::invalid_argument("sample_dem: dimension mismatch");
    DemSample s;
    s.mechanisms = sample_thresholds(thresholds, rng);
    s.detectors = mat_vec_mul(h, s.mechanisms);
    s.observables = mat_vec_mul(o, s.mechanisms);
    return s;
}

struct IidBitFlip {
    double p{0.0};
    friend bool operator==(const IidBitFlip&, const IidBitFlip&) = default;
};

struct Phenomenological {
    double p_data{0.0};
    double p_meas{0.0};
    int rounds{1};
    friend bool operator==(const Phenomenological&, const Phenomenological&) = default;
};

struct DemMechanisms {
    std::vector<double> probs;
    friend bool operator==(const DemMechanisms&, const DemMechanisms&) = default;
};

using NoiseSpec = std::variant<IidBitFlip, Phenomenological, DemMechanisms>;

inline void validate(const NoiseSpec& spec) {
    auto check = [](double p, const char* what) {
        if (!(p >= 0.0 && p <= 0.5)) throw std::invalid_argument(std::string("noise: ") + what + " must be in [0, 0.5], got " + std::to_string(p));
    };
    if (const auto* iid = std::get_if<IidBitFlip>(&spec)) {
        check(iid->p, "p");
    } else if (const auto* ph = std::get_if<Phenomenological>(&spec)) {
        check(ph->p_data, "p_data");
        check(ph->p_meas, "p_meas");
        if (ph->rounds < 1) throw std::invalid_argument("noise: rounds must be >= 1");
    } else {
        for (double p : std::get<DemMechanisms>(spec).probs) check(p, "mechanism probability");
    }
}

}  // namespace qdiv
