#pragma once

// Saturating q[T,F] fixed-point arithmetic for decoder messages.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qdiv {

/// q[T,F]: T-bit two's complement with F fractional bits.
struct FixedFormat {
    int total_bits{8};
    int frac_bits{4};

    static FixedFormat make(int total, int frac) {
        if (total < 2 || total > 32) throw std::invalid_argument("fixed format: total bits must be in [2, 32], got " + std::to_string(total));
        if (frac < 0 || frac > total - 1) {
            throw std::invalid_argument("fixed format: fractional bits must be in [0, " + std::to_string(total - 1) + "], got " +
                                        std::to_string(frac));
        }
        return {total, frac};
    }

    [[nodiscard]] std::int64_t raw_max() const noexcept { return (std::int64_t{1} << (total_bits - 1)) - 1; }
    [[nodiscard]] std::int64_t raw_min() const noexcept { return -(std::int64_t{1} << (total_bits - 1)); }
    [[nodiscard]] double step() const noexcept { return std::ldexp(1.0, -frac_bits); }
    [[nodiscard]] double max_value() const noexcept { return static_cast<double>(raw_max()) * step(); }
    [[nodiscard]] double min_value() const noexcept { return static_cast<double>(raw_min()) * step(); }

    [[nodiscard]] std::int64_t saturate(std::int64_t raw) const noexcept {
        return raw > raw_max() ? raw_max() : (raw < raw_min() ? raw_min() : raw);
    }

    [[nodiscard]] std::string to_string() const {
        return "q[" + std::to_string(total_bits) + "," + std::to_string(frac_bits) + "]";
    }

    friend bool operator==(const FixedFormat&, const FixedFormat&) = default;
};

struct QValue {
    std::int64_t raw{0};
    FixedFormat format{};

    [[nodiscard]] double value() const noexcept { return std::ldexp(static_cast<double>(raw), -format.frac_bits); }

    friend bool operator==(const QValue&, const QValue&) = default;
    friend auto operator<=>(const QValue& a, const QValue& b) { return a.value() <=> b.value(); }
};

/// Round half away from zero, then saturate, on an already scaled (raw-unit) real.
inline std::int64_t round_saturate(double scaled, const FixedFormat& fmt, bool* saturated = nullptr) {
    const double r = std::round(scaled);
    std::int64_t raw = 0;
    bool clipped = false;
    if (r > static_cast<double>(fmt.raw_max())) {
        raw = fmt.raw_max();
        clipped = true;
    } else if (r < static_cast<double>(fmt.raw_min())) {
        raw = fmt.raw_min();
        clipped = true;
    } else {
        raw = static_cast<std::int64_t>(r);
    }
    if (clipped && saturated != nullptr) *saturated = true;
    return raw;
}

inline QValue quantize(double x, const FixedFormat& fmt) {
    if (!std::isfinite(x)) throw std::invalid_argument("quantize: non-finite input");
    return {round_saturate(std::ldexp(x, fmt.frac_bits), fmt), fmt};
}

inline QValue sat_add(const QValue& a, const QValue& b) {
    if (!(a.format == b.format)) {
        throw std::invalid_argument("sat_add: format mismatch " + a.format.to_string() + " vs " + b.format.to_string());
    }
    return {a.format.saturate(a.raw + b.raw), a.format};
}

/// Multiplies by alpha in (0, 1] and re-quantizes with the same rounding rule.
inline QValue scale(const QValue& a, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("scale: alpha must be in (0, 1]");
    return {round_saturate(static_cast<double>(a.raw) * alpha, a.format), a.format};
}

/// Message arithmetic: unquantized double precision, or a fixed-point format.
struct Arithmetic {
    std::optional<FixedFormat> fixed;

    static Arithmetic float64() { return {}; }
    static Arithmetic q(int total, int frac) { return {FixedFormat::make(total, frac)}; }

    [[nodiscard]] bool is_float() const noexcept { return !fixed.has_value(); }

    [[nodiscard]] std::string to_string() const { return fixed ? fixed->to_string() : std::string("float64"); }

    /// Accepts "float64" or "q[T,F]".
    static Arithmetic parse(std::string_view text) {
        if (text == "float64") return float64();
        auto fail = [&] { return std::invalid_argument("invalid arithmetic '" + std::string(text) + "': expected \"float64\" or \"q[T,F]\""); };
        if (text.size() < 6 || text.substr(0, 2) != "q[" || text.back() != ']') throw fail();
        const auto body = text.substr(2, text.size() - 3);
        const auto comma = body.find(',');
        if (comma == std::string_view::npos) throw fail();
        auto to_int = [&](std::string_view s) {
            if (s.empty() || s.size() > 3) throw fail();
            int v = 0;
            for (char c : s) {
                if (c < '0' || c > '9') throw fail();
                v = v * 10 + (c - '0');
            }
            return v;
        };
        return {FixedFormat::make(to_int(body.substr(0, comma)), to_int(body.substr(comma + 1)))};
    }

    friend bool operator==(const Arithmetic&, const Arithmetic&) = default;
};

}  // namespace qdiv
