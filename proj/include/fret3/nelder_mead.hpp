#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "errors.hpp"

namespace fret3 {

struct NelderMeadOptions {
    int max_evaluations = 200;
    double f_tolerance = 1e-12;   ///< spread of simplex values
    double x_tolerance = 1e-8;    ///< simplex diameter
    std::vector<double> initial_step;  ///< per coordinate; default 5% (or 1e-3 at zero)
    std::vector<double> lower;    ///< optional box, points are clamped
    std::vector<double> upper;
};

struct NelderMeadResult {
    std::vector<double> x;
    double f = 0.0;
    int evaluations = 0;
    double diameter = 0.0;
    bool converged = false;  ///< false if the evaluation budget ran out
};

/// Minimizes f with the standard reflect/expand/contract/shrink simplex moves
/// (coefficients 1, 2, 1/2, 1/2).
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> start, const NelderMeadOptions& opt = {}) {
    const std::size_t n = start.size();
    if (n == 0) throw ValidationError("nelder_mead: empty start point");
    const bool boxed = !opt.lower.empty();
    if (boxed && (opt.lower.size() != n || opt.upper.size() != n)) {
        throw ValidationError("nelder_mead: bounds size mismatch");
    }
    auto clamp = [&](std::vector<double>& x) {
        if (!boxed) return;
        for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], opt.lower[i], opt.upper[i]);
    };
    if (boxed) {
        for (std::size_t i = 0; i < n; ++i) {
            if (start[i] < opt.lower[i] || start[i] > opt.upper[i]) {
                throw ValidationError("nelder_mead: start outside bounds");
            }
        }
    }

    NelderMeadResult res;
    auto eval = [&](const std::vector<double>& x) {
        ++res.evaluations;
        return f(x);
    };

    std::vector<std::vector<double>> pts(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) {
        double step = opt.initial_step.size() == n ? opt.initial_step[i]
                                                   : (start[i] != 0.0 ? 0.05 * start[i] : 1e-3);
        pts[i + 1][i] += step;
        clamp(pts[i + 1]);
        if (pts[i + 1][i] == start[i]) {
            pts[i + 1][i] -= step;
            clamp(pts[i + 1]);
        }
    }
    std::vector<double> vals(n + 1);
    for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

    std::vector<std::size_t> order(n + 1);
    auto diameter = [&] {
        double d = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += std::pow(pts[i][k] - pts[0][k], 2);
            d = std::max(d, std::sqrt(s));
        }
        return d;
    };
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
        std::vector<std::vector<double>> p2;
        std::vector<double> v2;
        for (auto i : order) {
            p2.push_back(pts[i]);
            v2.push_back(vals[i]);
        }
        pts = std::move(p2);
        vals = std::move(v2);
    };

    sort_simplex();
    while (true) {
        if (std::abs(vals[n] - vals[0]) <= opt.f_tolerance || diameter() <= opt.x_tolerance) {
            res.converged = true;
            break;
        }
        if (res.evaluations >= opt.max_evaluations) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / static_cast<double>(n);
        auto along = [&](double t) {
            std::vector<double> x(n);
            for (std::size_t k = 0; k < n; ++k) x[k] = centroid[k] + t * (pts[n][k] - centroid[k]);
            clamp(x);
            return x;
        };

        auto xr = along(-1.0);
        const double fr = eval(xr);
        if (fr < vals[0]) {
            auto xe = along(-2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
        } else if (fr < vals[n - 1]) {
            pts[n] = xr;
            vals[n] = fr;
        } else {
            const bool outside = fr < vals[n];
            auto xc = along(outside ? -0.5 : 0.5);
            const double fc = eval(xc);
            if (fc < (outside ? fr : vals[n])) {
                pts[n] = xc;
                vals[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t k = 0; k < n; ++k) pts[i][k] = pts[0][k] + 0.5 * (pts[i][k] - pts[0][k]);
                    clamp(pts[i]);
                    vals[i] = eval(pts[i]);
                }
            }
        }
        sort_simplex();
    }
    res.x = pts[0];
    res.f = vals[0];
    res.diameter = diameter();
    return res;
}

}  // namespace fret3
