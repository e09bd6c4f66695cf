#pragma once

// Flat key=value configuration: one key per line, '#' starts a comment.
// Later assignments (including command-line overrides) replace earlier ones.

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cvswap/errors.hpp"
#include "cvswap/optimizer.hpp"
#include "cvswap/swapping.hpp"

namespace cvswap::experiments {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        auto piece = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (!piece.empty()) out.push_back(std::move(piece));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace detail

class Config {
public:
    static Config parse(std::string_view text, std::string_view origin = "<text>") {
        Config c;
        std::istringstream in{std::string(text)};
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            const auto t = detail::trim(line);
            if (t.empty()) continue;
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw ConfigError(std::string(origin) + ":" + std::to_string(lineno) + ": expected key=value");
            c.set(t.substr(0, eq), t.substr(eq + 1));
        }
        return c;
    }

    static Config load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw ConfigError("cannot open config file '" + path + "'");
        std::ostringstream ss;
        ss << f.rdbuf();
        return parse(ss.str(), path);
    }

    void set(std::string_view key, std::string_view value) {
        const auto k = detail::trim(key);
        if (k.empty()) throw ConfigError("empty key");
        values_[k] = detail::trim(value);
    }

    // "key=value"
    void set_assignment(std::string_view kv) {
        const auto eq = kv.find('=');
        if (eq == std::string_view::npos) throw ConfigError("override '" + std::string(kv) + "' is not key=value");
        set(kv.substr(0, eq), kv.substr(eq + 1));
    }

    void merge(const Config& other) {
        for (const auto& [k, v] : other.values_) values_[k] = v;
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get(const std::string& key, const std::string& fallback) const {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        return to_double(key, it->second);
    }

    bool get_bool(const std::string& key, bool fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        const auto& v = it->second;
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError("key '" + key + "': expected a boolean, got '" + v + "'");
    }

    // Keys present here but not in `allowed`.
    std::vector<std::string> unknown_keys(const std::set<std::string>& allowed) const {
        std::vector<std::string> out;
        for (const auto& [k, v] : values_)
            if (!allowed.count(k)) out.push_back(k);
        return out;
    }

    void require_known(const std::set<std::string>& allowed) const {
        const auto bad = unknown_keys(allowed);
        if (!bad.empty()) throw ConfigError("unknown config key '" + bad.front() + "'");
    }

    const std::map<std::string, std::string>& entries() const noexcept { return values_; }

    static double to_double(const std::string& key, const std::string& v) {
        double out = 0.0;
        const auto* end = v.data() + v.size();
        const auto [ptr, ec] = std::from_chars(v.data(), end, out);
        if (ec != std::errc{} || ptr != end || !std::isfinite(out))
            throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
        return out;
    }

private:
    std::map<std::string, std::string> values_;
};

inline const std::set<std::string>& apparatus_keys() {
    static const std::set<std::string> keys{"apparatus", "g1", "g4", "T2", "T3", "tau1", "tau4", "nth1", "nth4"};
    return keys;
}

inline const std::set<std::string>& scenario_keys() {
    static const std::set<std::string> keys = [] {
        std::set<std::string> k = apparatus_keys();
        k.insert({"input", "resource", "r12", "r34", "constraint", "free", "delta12", "delta34", "gain_fraction_g1",
                  "direct"});
        return k;
    }();
    return keys;
}

// apparatus=ideal|realistic picks the base; individual keys override it.
inline ApparatusParams apparatus_from_config(const Config& c) {
    const auto base = c.get("apparatus", "ideal");
    ApparatusParams a;
    if (base == "realistic")
        a = realistic_apparatus();
    else if (base != "ideal")
        throw ConfigError("apparatus must be 'ideal' or 'realistic', got '" + base + "'");
    a.g1 = c.get_double("g1", a.g1);
    a.g4 = c.get_double("g4", a.g4);
    a.T2 = c.get_double("T2", a.T2);
    a.T3 = c.get_double("T3", a.T3);
    a.tau1 = c.get_double("tau1", a.tau1);
    a.tau4 = c.get_double("tau4", a.tau4);
    a.nth1 = c.get_double("nth1", a.nth1);
    a.nth4 = c.get_double("nth4", a.nth4);
    try {
        a.validate();
    } catch (const ParameterRangeError& e) {
        throw ConfigError(e.what());
    }
    return a;
}

inline StateFamily family_from_config(const Config& c, const std::string& key, const std::string& fallback) {
    const auto v = c.get(key, fallback);
    try {
        return parse_family(v);
    } catch (const ContractViolation&) {
        throw ConfigError("key '" + key + "': unknown state family '" + v + "'");
    }
}

inline Scenario scenario_from_config(const Config& c) {
    Scenario s;
    s.input_family = family_from_config(c, "input", "TB");
    s.resource_family = family_from_config(c, "resource", "TB");
    s.r12 = c.get_double("r12", 0.0);
    s.r34 = c.get_double("r34", 0.0);
    s.apparatus = apparatus_from_config(c);
    const auto constraint = c.get("constraint", "none");
    if (constraint == "symmetric")
        s.constraint = Constraint::Symmetric;
    else if (constraint != "none")
        throw ConfigError("constraint must be 'none' or 'symmetric', got '" + constraint + "'");
    const auto free = c.get("free", "auto");
    if (free != "auto") {
        for (const auto& name : detail::split(free, ',')) {
            try {
                s.free_params.push_back(parse_free_param(name));
            } catch (const ContractViolation& e) {
                throw ConfigError(e.what());
            }
        }
    }
    s.delta12 = c.get_double("delta12", 0.0);
    s.delta34 = c.get_double("delta34", 0.0);
    s.gain_fraction_g1 = c.get_double("gain_fraction_g1", 0.0);
    s.direct = c.get_bool("direct", false);
    try {
        s.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return s;
}

}  // namespace cvswap::experiments
