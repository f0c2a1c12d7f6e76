#pragma once

#include <cctype>
#include <cmath>
#include <compare>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>

#include "errors.hpp"

namespace fret3 {

/// Integer or half-integer angular momentum quantum number, stored as twice its value.
class HalfInt {
public:
    constexpr HalfInt() = default;

    static constexpr HalfInt from_twice(int twice) {
        HalfInt h;
        h.twice_ = twice;
        return h;
    }
    static constexpr HalfInt integer(int v) { return from_twice(2 * v); }
    static HalfInt from_double(double v) {
        const double t = 2.0 * v;
        const long r = std::lround(t);
        if (std::abs(t - static_cast<double>(r)) > 1e-9) {
            throw ValidationError("not a half-integer: " + std::to_string(v));
        }
        return from_twice(static_cast<int>(r));
    }

    constexpr int twice() const { return twice_; }
    constexpr double value() const { return 0.5 * twice_; }
    constexpr bool is_integer() const { return twice_ % 2 == 0; }

    constexpr HalfInt operator-() const { return from_twice(-twice_); }
    constexpr HalfInt operator+(HalfInt o) const { return from_twice(twice_ + o.twice_); }
    constexpr HalfInt operator-(HalfInt o) const { return from_twice(twice_ - o.twice_); }
    constexpr HalfInt& operator+=(HalfInt o) {
        twice_ += o.twice_;
        return *this;
    }

    constexpr auto operator<=>(const HalfInt&) const = default;

    /// "3/2", "-1/2", "2".
    std::string str() const {
        if (twice_ % 2 == 0) return std::to_string(twice_ / 2);
        return std::to_string(twice_) + "/2";
    }

private:
    int twice_ = 0;
};

constexpr HalfInt abs(HalfInt h) { return h.twice() < 0 ? -h : h; }

inline constexpr HalfInt half = HalfInt::from_twice(1);

/// Spectroscopic letter for an orbital angular momentum.
inline char orbital_letter(int l) {
    constexpr const char* letters = "SPDFGHIKLMNOQRTUV";
    if (l < 0 || l > 16) throw ValidationError("orbital angular momentum out of range");
    return letters[l];
}

/// Single-atom fine-structure state |n l j m_j>.
struct RydbergState {
    int n = 0;
    int l = 0;
    HalfInt j;
    HalfInt mj;

    auto operator<=>(const RydbergState&) const = default;

    /// "70P3/2(1/2)"
    std::string label() const {
        return std::to_string(n) + orbital_letter(l) + j.str() + "(" + mj.str() + ")";
    }
    /// "70P3/2"
    std::string level_label() const { return std::to_string(n) + orbital_letter(l) + j.str(); }
};

/// Checks the quantum-number invariants of a single-electron alkali state.
inline bool is_valid(const RydbergState& s) {
    if (s.n < 1 || s.l < 0 || s.l >= s.n) return false;
    if (s.j.is_integer() || s.mj.is_integer()) return false;
    if (s.j.twice() != 2 * s.l + 1 && s.j.twice() != 2 * s.l - 1) return false;
    if (s.j.twice() < 1) return false;
    return abs(s.mj) <= s.j;
}

inline RydbergState make_state(int n, int l, HalfInt j, HalfInt mj) {
    RydbergState s{n, l, j, mj};
    if (!is_valid(s)) {
        throw ValidationError("invalid quantum numbers n=" + std::to_string(n) + " l=" +
                              std::to_string(l) + " j=" + j.str() + " mj=" + mj.str());
    }
    return s;
}

/// Convenience overload taking j and m_j as doubles (1.5, 0.5, ...).
inline RydbergState make_state(int n, int l, double j, double mj) {
    return make_state(n, l, HalfInt::from_double(j), HalfInt::from_double(mj));
}

namespace detail {
inline HalfInt parse_half(const std::string& t, const std::string& whole) {
    try {
        std::size_t pos = 0;
        const int num = std::stoi(t, &pos);
        if (pos == t.size()) return HalfInt::integer(num);
        if (t.compare(pos, 2, "/2") == 0 && pos + 2 == t.size()) return HalfInt::from_twice(num);
    } catch (const std::logic_error&) {
    }
    throw ValidationError("cannot parse state label '" + whole + "'");
}
}  // namespace detail

/// Inverse of RydbergState::label(): "70P3/2(1/2)", "71S1/2(-1/2)".
inline RydbergState parse_state(const std::string& text) {
    const auto bad = [&] { return ValidationError("cannot parse state label '" + text + "'"); };
    std::size_t i = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (i == 0 || i >= text.size()) throw bad();
    const int n = std::stoi(text.substr(0, i));
    const std::string letters = "SPDFGHIKLMNOQRTUV";
    const auto l = letters.find(text[i]);
    if (l == std::string::npos) throw bad();
    const auto open = text.find('(', i);
    if (open == std::string::npos || text.back() != ')') throw bad();
    const HalfInt j = detail::parse_half(text.substr(i + 1, open - i - 1), text);
    const HalfInt mj = detail::parse_half(text.substr(open + 1, text.size() - open - 2), text);
    return make_state(n, static_cast<int>(l), j, mj);
}

/// Identifies one fine-structure series (l, j) of the species.
struct SeriesKey {
    int l = 0;
    HalfInt j;

    auto operator<=>(const SeriesKey&) const = default;

    std::string label() const { return std::string(1, orbital_letter(l)) + j.str(); }
};

inline SeriesKey series_of(const RydbergState& s) { return {s.l, s.j}; }

}  // namespace fret3

template <>
struct std::hash<fret3::RydbergState> {
    std::size_t operator()(const fret3::RydbergState& s) const noexcept {
        std::size_t h = static_cast<std::size_t>(s.n);
        h = h * 131 + static_cast<std::size_t>(s.l);
        h = h * 131 + static_cast<std::size_t>(s.j.twice());
        h = h * 131 + static_cast<std::size_t>(s.mj.twice() + 64);
        return h;
    }
};
