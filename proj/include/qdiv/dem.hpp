#pragma once

// Detector error model text: parsing, canonical serialization, and conversion to a decoding problem.
//
// Accepted grammar (one instruction per line):
//   line        = [ instruction ] [ "#" comment ]
//   instruction = "error" "(" prob ")" { target }
//               | "detector" [ "(" coords ")" ] "D" int
//               | "logical_observable" "L" int
//   target      = "D" int | "L" int | "^"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qdiv/gf2.hpp"
#include "qdiv/problem.hpp"

namespace qdiv {

struct Mechanism {
    double probability{0.0};
    std::vector<std::uint32_t> detectors;    // sorted, distinct
    std::vector<std::uint32_t> observables;  // sorted, distinct

    friend bool operator==(const Mechanism&, const Mechanism&) = default;
};

struct DetectorModel {
    std::size_t num_detectors{0};
    std::size_t num_observables{0};
    std::vector<Mechanism> mechanisms;

    friend bool operator==(const DetectorModel&, const DetectorModel&) = default;
};

/// Probability that exactly one of two independent events fires.
inline double combine_probabilities(double p1, double p2) { return p1 * (1.0 - p2) + p2 * (1.0 - p1); }

class DemParseError : public std::runtime_error {
public:
    DemParseError(std::size_t line, const std::string& what)
        : std::runtime_error("dem line " + std::to_string(line) + ": " + what), line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::uint32_t parse_index(std::string_view tok, std::size_t line) {
    std::uint32_t v = 0;
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (tok.empty() || ec != std::errc{} || ptr != end) throw DemParseError(line, "malformed target index '" + std::string(tok) + "'");
    return v;
}

inline void toggle(std::vector<std::uint32_t>& set, std::uint32_t v) {
    auto it = std::lower_bound(set.begin(), set.end(), v);
    if (it != set.end() && *it == v) {
        set.erase(it);
    } else {
        set.insert(it, v);
    }
}

}  // namespace detail

/// Parses the flat DEM subset. Mechanisms with identical (detectors, observables) are merged in
/// place of their first occurrence. Coordinate arguments are skipped and reported in `warnings`.
inline DetectorModel parse_dem(std::string_view text, std::vector<std::string>* warnings = nullptr) {
    DetectorModel dm;
    std::map<std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>, std::size_t> index;
    std::size_t declared_detectors = 0;
    std::size_t declared_observables = 0;
    std::size_t max_detector = 0;
    std::size_t max_observable = 0;
    bool coords_warned = false;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        const auto name_end = line.find_first_of(" \t(");
        const std::string_view name = line.substr(0, name_end);
        std::string_view rest = name_end == std::string_view::npos ? std::string_view{} : line.substr(name_end);
        std::string_view arg;
        bool has_arg = false;
        rest = detail::trim(rest);
        if (!rest.empty() && rest.front() == '(') {
            const auto close = rest.find(')');
            if (close == std::string_view::npos) throw DemParseError(line_no, "unterminated '('");
            arg = detail::trim(rest.substr(1, close - 1));
            has_arg = true;
            rest = rest.substr(close + 1);
        }
        std::vector<std::string_view> tokens;
        {
            std::size_t i = 0;
            while (i < rest.size()) {
                while (i < rest.size() && (rest[i] == ' ' || rest[i] == '\t' || rest[i] == '\r')) ++i;
                const auto start = i;
                while (i < rest.size() && rest[i] != ' ' && rest[i] != '\t' && rest[i] != '\r') ++i;
                if (i > start) tokens.push_back(rest.substr(start, i - start));
            }
        }

        if (name == "error") {
            if (!has_arg) throw DemParseError(line_no, "error instruction requires a probability argument");
            double p = 0.0;
            auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), p);
            if (arg.empty() || ec != std::errc{} || ptr != arg.data() + arg.size()) {
                throw DemParseError(line_no, "malformed probability '" + std::string(arg) + "'");
            }
            if (!(p > 0.0 && p < 1.0)) throw DemParseError(line_no, "probability " + std::string(arg) + " outside (0, 1)");
            Mechanism mech;
            mech.probability = p;
            for (auto tok : tokens) {
                if (tok == "^") continue;
                if (tok.front() == 'D') {
                    const auto d = detail::parse_index(tok.substr(1), line_no);
                    detail::toggle(mech.detectors, d);
                    max_detector = std::max<std::size_t>(max_detector, std::size_t{d} + 1);
                } else if (tok.front() == 'L') {
                    const auto l = detail::parse_index(tok.substr(1), line_no);
                    detail::toggle(mech.observables, l);
                    max_observable = std::max<std::size_t>(max_observable, std::size_t{l} + 1);
                } else {
                    throw DemParseError(line_no, "unexpected target '" + std::string(tok) + "'");
                }
            }
            auto key = std::make_pair(mech.detectors, mech.observables);
            if (auto it = index.find(key); it != index.end()) {
                auto& existing = dm.mechanisms[it->second];
                existing.probability = combine_probabilities(existing.probability, p);
            } else {
                index.emplace(std::move(key), dm.mechanisms.size());
                dm.mechanisms.push_back(std::move(mech));
            }
        } else if (name == "detector" || name == "logical_observable") {
            const bool det = name == "detector";
            if (has_arg) {
                if (!det) throw DemParseError(line_no, "logical_observable takes no arguments");
                if (warnings != nullptr && !coords_warned) warnings->push_back("dem line " + std::to_string(line_no) + ": detector coordinates ignored");
                coords_warned = true;
            }
            if (tokens.size() != 1 || tokens[0].front() != (det ? 'D' : 'L')) {
                throw DemParseError(line_no, std::string(name) + " expects a single " + (det ? "D" : "L") + "<index> target");
            }
            const std::size_t v = std::size_t{detail::parse_index(tokens[0].substr(1), line_no)} + 1;
            (det ? declared_detectors : declared_observables) = std::max(det ? declared_detectors : declared_observables, v);
        } else {
            throw DemParseError(line_no, "unsupported instruction '" + std::string(name) + "'");
        }
    }
    if (dm.mechanisms.empty()) throw std::runtime_error("dem: no mechanisms");
    dm.num_detectors = std::max(declared_detectors, max_detector);
    dm.num_observables = std::max(declared_observables, max_observable);
    return dm;
}

/// Sorts mechanisms by (detector set, observable set).
inline DetectorModel canonicalize(DetectorModel dm) {
    std::stable_sort(dm.mechanisms.begin(), dm.mechanisms.end(), [](const Mechanism& a, const Mechanism& b) {
        if (a.detectors != b.detectors) return a.detectors < b.detectors;
        return a.observables < b.observables;
    });
    return dm;
}

inline std::string format_probability(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", p);
    return buf;
}

inline std::string serialize_dem(const DetectorModel& dm) {
    const DetectorModel c = canonicalize(dm);
    std::ostringstream out;
    std::size_t max_d = 0;
    std::size_t max_l = 0;
    for (const auto& m : c.mechanisms) {
        out << "error(" << format_probability(m.probability) << ")";
        for (auto d : m.detectors) {
            out << " D" << d;
            max_d = std::max<std::size_t>(max_d, std::size_t{d} + 1);
        }
        for (auto l : m.observables) {
            out << " L" << l;
            max_l = std::max<std::size_t>(max_l, std::size_t{l} + 1);
        }
        out << '\n';
    }
    if (c.num_detectors > max_d) out << "detector D" << c.num_detectors - 1 << '\n';
    if (c.num_observables > max_l) out << "logical_observable L" << c.num_observables - 1 << '\n';
    return out.str();
}

/// H (detectors × mechanisms), O (observables × mechanisms), and per-mechanism probabilities.
inline DecodingProblem to_decoding_problem(const DetectorModel& dm, std::string name = "dem") {
    using idx = SparseBitMatrix::index_type;
    const std::size_t cols = dm.mechanisms.size();
    std::vector<std::vector<idx>> hrows(dm.num_detectors);
    std::vector<std::vector<idx>> orows(dm.num_observables);
    std::vector<double> probs(cols);
    for (std::size_t k = 0; k < cols; ++k) {
        const auto& m = dm.mechanisms[k];
        for (auto d : m.detectors) hrows.at(d).push_back(static_cast<idx>(k));
        for (auto l : m.observables) orows.at(l).push_back(static_cast<idx>(k));
        probs[k] = m.probability;
    }
    return make_problem(std::move(name), SparseBitMatrix(dm.num_detectors, cols, std::move(hrows)),
                        SparseBitMatrix(dm.num_observables, cols, std::move(orows)), std::move(probs), true);
}

}  // namespace qdiv
