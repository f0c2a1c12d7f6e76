#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "quantum_numbers.hpp"

namespace fret3 {

/// Second-order Rydberg-Ritz coefficients of one series.
struct RitzCoefficients {
    double delta0 = 0.0;
    double delta2 = 0.0;
};

/// Per-series quantum defects plus the species Rydberg constant.
class QuantumDefectTable {
public:
    QuantumDefectTable() = default;
    QuantumDefectTable(std::string species, double rydberg_mhz,
                       std::optional<int> hydrogenic_from_l = std::nullopt)
        : species_(std::move(species)),
          rydberg_mhz_(rydberg_mhz),
          hydrogenic_from_l_(hydrogenic_from_l) {}

    void set(SeriesKey key, RitzCoefficients c) { series_[key] = c; }

    const std::string& species() const { return species_; }
    double rydberg_mhz() const { return rydberg_mhz_; }
    std::optional<int> hydrogenic_from_l() const { return hydrogenic_from_l_; }
    const std::map<SeriesKey, RitzCoefficients>& series() const { return series_; }

    bool contains(SeriesKey key) const {
        return series_.count(key) != 0 || (hydrogenic_from_l_ && key.l >= *hydrogenic_from_l_);
    }

    /// Quantum defect of state n in the series; l beyond the tabulated range is hydrogenic.
    double defect(int n, SeriesKey key) const {
        auto it = series_.find(key);
        if (it == series_.end()) {
            if (hydrogenic_from_l_ && key.l >= *hydrogenic_from_l_) return 0.0;
            throw UnknownSeriesError("no quantum defects for series " + key.label() + " of " +
                                     species_);
        }
        const auto& c = it->second;
        const double x = n - c.delta0;
        return c.delta0 + c.delta2 / (x * x);
    }

    double effective_n(int n, SeriesKey key) const { return n - defect(n, key); }

    /// Returns a copy with every defect set to zero (hydrogen-like spectrum).
    QuantumDefectTable zeroed() const {
        QuantumDefectTable t = *this;
        for (auto& [key, c] : t.series_) c = RitzCoefficients{};
        return t;
    }

private:
    std::string species_;
    double rydberg_mhz_ = 0.0;
    std::optional<int> hydrogenic_from_l_;
    std::map<SeriesKey, RitzCoefficients> series_;
};

/// 0 K radiative lifetime tau = tau_s * n*^gamma.
struct RadiativeScaling {
    double tau_s_ns = 0.0;
    double exponent = 0.0;
};

/// Blackbody-induced depopulation rate
///   A / n*^D * 2.14e10 / (exp(315780 B / (n*^C T)) - 1)   [1/s]
struct BlackbodyScaling {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
};

struct LifetimeCoefficients {
    RadiativeScaling radiative;
    BlackbodyScaling blackbody;
};

class LifetimeModel {
public:
    LifetimeModel() = default;
    explicit LifetimeModel(double temperature_k) : temperature_k_(temperature_k) {}

    void set(SeriesKey key, LifetimeCoefficients c) { series_[key] = c; }
    bool contains(SeriesKey key) const { return series_.count(key) != 0; }
    const std::map<SeriesKey, LifetimeCoefficients>& series() const { return series_; }

    double temperature() const { return temperature_k_; }
    LifetimeModel at_temperature(double kelvin) const {
        LifetimeModel m = *this;
        m.temperature_k_ = kelvin;
        return m;
    }

    const LifetimeCoefficients& coefficients(SeriesKey key) const {
        auto it = series_.find(key);
        if (it == series_.end()) {
            throw UnknownSeriesError("no lifetime data for series " + key.label());
        }
        return it->second;
    }

private:
    double temperature_k_ = 300.0;
    std::map<SeriesKey, LifetimeCoefficients> series_;
};

/// Everything loaded from one species data file.
struct SpeciesData {
    std::string species;
    std::string version;
    QuantumDefectTable defects;
    LifetimeModel lifetimes;
    std::string checksum;  ///< FNV-1a 64 of the file bytes, hex
    std::string source;    ///< path the data was read from
};

/// FNV-1a 64-bit hash, rendered as 16 hex digits.
inline std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline double parse_number(const std::string& text, const std::string& where) {
    std::istringstream is(text);
    is.imbue(std::locale::classic());
    double v = 0.0;
    is >> v;
    if (!is || !is.eof()) throw ValidationError(where + ": expected a number, got '" + text + "'");
    return v;
}

/// "S1/2" -> {0, 1/2}
inline SeriesKey parse_series_label(const std::string& label, const std::string& where) {
    constexpr std::string_view letters = "SPDFGHI";
    if (label.size() < 2) throw ValidationError(where + ": bad series label '" + label + "'");
    const auto l = letters.find(label[0]);
    if (l == std::string_view::npos) {
        throw ValidationError(where + ": bad series label '" + label + "'");
    }
    const auto slash = label.find('/');
    if (slash == std::string::npos || label.substr(slash) != "/2") {
        throw ValidationError(where + ": j must be written as k/2 in '" + label + "'");
    }
    const int twice_j = static_cast<int>(parse_number(label.substr(1, slash - 1), where));
    const int il = static_cast<int>(l);
    if (twice_j != 2 * il + 1 && twice_j != 2 * il - 1) {
        throw ValidationError(where + ": inconsistent l and j in '" + label + "'");
    }
    return {il, HalfInt::from_twice(twice_j)};
}

}  // namespace detail

/// Parses a species data file.
///
/// Format: `key = value` lines, `#` comments, and `[series X]` sections, e.g.
///
///     species = Rb87
///     rydberg_constant_mhz = 3289821194.48
///     [series P3/2]
///     delta0 = 2.6416737
///     delta2 = 0.2950
///     tau_rad_ns = 2.5341
///     tau_rad_exponent = 2.9966
///     bbr_a = 0.046
///     ...
///
/// Radiative and blackbody keys are optional per series; a series without them
/// has energies but no lifetime.
inline SpeciesData parse_species(std::string_view text, const std::string& source = "<memory>",
                                 double temperature_k = 300.0) {
    SpeciesData out;
    out.source = source;
    out.checksum = fnv1a_hex(text);

    std::map<std::string, std::string> header;
    struct Section {
        SeriesKey key;
        std::map<std::string, std::pair<std::string, int>> values;
        int line = 0;
    };
    std::vector<Section> sections;

    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string where = source + ":" + std::to_string(line_no);
        auto line = detail::trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.rfind("[series ", 0) != 0) {
                throw ValidationError(where + ": expected '[series <label>]'");
            }
            const auto label = detail::trim(line.substr(8, line.size() - 9));
            sections.push_back({detail::parse_series_label(label, where), {}, line_no});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ValidationError(where + ": expected 'key = value'");
        auto key = detail::trim(line.substr(0, eq));
        auto value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw ValidationError(where + ": empty key or value");
        if (sections.empty()) {
            header[key] = value;
        } else {
            sections.back().values[key] = {value, line_no};
        }
    }

    auto require = [&](const char* key) -> std::string {
        auto it = header.find(key);
        if (it == header.end()) {
            throw ValidationError(source + ": missing required key '" + key + "'");
        }
        return it->second;
    };
    out.species = require("species");
    out.version = header.count("version") ? header["version"] : "unversioned";
    const double rydberg = detail::parse_number(require("rydberg_constant_mhz"), source);
    std::optional<int> hydrogenic;
    if (header.count("hydrogenic_from_l")) {
        hydrogenic = static_cast<int>(detail::parse_number(header["hydrogenic_from_l"], source));
    }
    out.defects = QuantumDefectTable(out.species, rydberg, hydrogenic);
    out.lifetimes = LifetimeModel(temperature_k);

    for (const auto& sec : sections) {
        const std::string where = source + ":" + std::to_string(sec.line);
        auto get = [&](const char* key) -> std::optional<double> {
            auto it = sec.values.find(key);
            if (it == sec.values.end()) return std::nullopt;
            return detail::parse_number(it->second.first,
                                        source + ":" + std::to_string(it->second.second));
        };
        const auto d0 = get("delta0");
        if (!d0) throw ValidationError(where + ": series " + sec.key.label() + " lacks delta0");
        if (!(*d0 >= 0.0 && *d0 < 5.0)) {
            throw ValidationError(where + ": delta0 must lie in [0, 5)");
        }
        out.defects.set(sec.key, {*d0, get("delta2").value_or(0.0)});

        const auto tau = get("tau_rad_ns");
        const auto gam = get("tau_rad_exponent");
        if (tau && gam) {
            LifetimeCoefficients c;
            c.radiative = {*tau, *gam};
            const auto a = get("bbr_a"), b = get("bbr_b"), cc = get("bbr_c"), d = get("bbr_d");
            if (a && b && cc && d) c.blackbody = {*a, *b, *cc, *d};
            out.lifetimes.set(sec.key, c);
        }
    }
    return out;
}

inline SpeciesData load_species(const std::string& path, double temperature_k = 300.0) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open species data file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_species(ss.str(), path, temperature_k);
}

/// Term energy of a state in h*MHz relative to the ionization limit.
inline double level_energy_mhz(const RydbergState& s, const QuantumDefectTable& table) {
    const double ns = table.effective_n(s.n, series_of(s));
    return -table.rydberg_mhz() / (ns * ns);
}

/// Term energy of a state in h*GHz relative to the ionization limit (E = -Ry/(n - delta)^2).
inline double level_energy(const RydbergState& s, const QuantumDefectTable& table) {
    return 1e-3 * level_energy_mhz(s, table);
}

/// Total decay rate (radiative + blackbody) in 1/us.
inline double decay_rate(const RydbergState& s, const QuantumDefectTable& table,
                         const LifetimeModel& model) {
    const auto key = series_of(s);
    const auto& c = model.coefficients(key);
    const double ns = table.effective_n(s.n, key);
    const double radiative = 1.0 / (c.radiative.tau_s_ns * 1e-3 * std::pow(ns, c.radiative.exponent));
    double blackbody = 0.0;
    const double t = model.temperature();
    if (t > 0.0 && c.blackbody.a > 0.0) {
        const auto& bb = c.blackbody;
        const double x = 315780.0 * bb.b / (std::pow(ns, bb.c) * t);
        blackbody = bb.a / std::pow(ns, bb.d) * 2.14e10 / std::expm1(x) * 1e-6;
    }
    return radiative + blackbody;
}

}  // namespace fret3
