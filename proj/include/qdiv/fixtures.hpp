#pragma once

// Code fixture files: a one-line JSON preamble followed by named matrix sections.
//
//   {"name": "...", "n": 72, "k": 12, "d_upper": 6, "construction": "bivariate_bicycle", ...}
//   [hx]
//   <matrix text>
//
// Constructions: "bivariate_bicycle" (l, m, a_terms, b_terms in the preamble),
// "hypergraph_product" (sections h1, h2), "explicit" (sections hx, hz).

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qdiv/codes.hpp"
#include "qdiv/gf2.hpp"

#ifndef QDIV_DEFAULT_DATA_DIR
#define QDIV_DEFAULT_DATA_DIR "data"
#endif

namespace qdiv {

inline constexpr const char* kCodeFixtureExtension = ".code";

/// Data root: $QDIV_DATA_DIR if set, else the build-time default.
inline std::filesystem::path data_dir() {
    if (const char* env = std::getenv("QDIV_DATA_DIR"); env != nullptr && *env != '\0') return env;
    return QDIV_DEFAULT_DATA_DIR;
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CodeFixture {
    nlohmann::json preamble;
    std::map<std::string, SparseBitMatrix> sections;
};

inline CodeFixture parse_code_fixture(std::string_view text, const std::string& origin = "fixture") {
    std::istringstream in{std::string(text)};
    CodeFixture fx;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(origin + ": empty file");
    try {
        fx.preamble = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(origin + ": malformed JSON preamble: " + e.what());
    }
    if (!fx.preamble.is_object()) throw std::runtime_error(origin + ": preamble must be a JSON object");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.size() < 3 || line.front() != '[' || line.back() != ']') {
            throw std::runtime_error(origin + ": expected a [section] header, got '" + line + "'");
        }
        const std::string name = line.substr(1, line.size() - 2);
        try {
            fx.sections.insert_or_assign(name, read_matrix(in));
        } catch (const std::exception& e) {
            throw std::runtime_error(origin + ": section [" + name + "]: " + e.what());
        }
    }
    return fx;
}

inline std::string format_code_fixture(const nlohmann::json& preamble, const std::vector<std::pair<std::string, SparseBitMatrix>>& sections) {
    std::string out = preamble.dump() + "\n";
    for (const auto& [name, m] : sections) out += "[" + name + "]\n" + format_matrix(m);
    return out;
}

inline CssCode build_code(const CodeFixture& fx, const std::string& origin = "fixture") {
    const auto& pre = fx.preamble;
    auto section = [&](const std::string& name) -> const SparseBitMatrix& {
        auto it = fx.sections.find(name);
        if (it == fx.sections.end()) throw std::runtime_error(origin + ": missing section [" + name + "]");
        return it->second;
    };
    const std::string kind = pre.value("construction", std::string("explicit"));
    CssCode code;
    if (kind == "bivariate_bicycle") {
        auto terms = [&](const char* key) {
            std::vector<Monomial> out;
            for (const auto& t : pre.at(key)) out.push_back({t.at(0).get<int>(), t.at(1).get<int>()});
            return out;
        };
        code = bivariate_bicycle(pre.at("l").get<int>(), pre.at("m").get<int>(), terms("a_terms"), terms("b_terms"));
    } else if (kind == "hypergraph_product") {
        code = hypergraph_product(ClassicalCode(section("h1")), ClassicalCode(section("h2")));
    } else if (kind == "explicit") {
        code = make_css_code(section("hx"), section("hz"));
    } else {
        throw std::runtime_error(origin + ": unknown construction '" + kind + "'");
    }
    code.name = pre.value("name", origin);
    if (pre.contains("d_upper") && !pre.at("d_upper").is_null()) code.d_upper = pre.at("d_upper").get<int>();
    code.provenance = pre.value("provenance", std::string());
    if (pre.contains("n") && pre.at("n").get<std::size_t>() != code.n) {
        throw std::runtime_error(origin + ": declared n=" + std::to_string(pre.at("n").get<std::size_t>()) + " but construction gives " +
                                 std::to_string(code.n));
    }
    if (pre.contains("k") && pre.at("k").get<std::size_t>() != code.k) {
        throw std::runtime_error(origin + ": declared k=" + std::to_string(pre.at("k").get<std::size_t>()) + " but construction gives " +
                                 std::to_string(code.k));
    }
    return code;
}

inline CssCode load_code_file(const std::filesystem::path& path) {
    return build_code(parse_code_fixture(read_text_file(path), path.string()), path.string());
}

inline std::vector<std::string> code_preset_names() {
    std::vector<std::string> names;
    const auto dir = data_dir() / "codes";
    if (!std::filesystem::is_directory(dir)) return names;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == kCodeFixtureExtension) names.push_back(entry.path().stem().string());
    }
    std::sort(names.begin(), names.end());
    return names;
}

/// Preset name under data/codes, or a path to a fixture file.
inline CssCode load_code(const std::string& name_or_path) {
    const std::filesystem::path as_path(name_or_path);
    if (as_path.has_extension() && std::filesystem::exists(as_path)) return load_code_file(as_path);
    const auto preset = data_dir() / "codes" / (name_or_path + kCodeFixtureExtension);
    if (std::filesystem::exists(preset)) return load_code_file(preset);
    std::string known;
    for (const auto& n : code_preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown code '" + name_or_path + "' (presets: " + (known.empty() ? "none found in " + (data_dir() / "codes").string() : known) + ")");
}

}  // namespace qdiv
