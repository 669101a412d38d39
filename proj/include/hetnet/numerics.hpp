#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hetnet::numerics {

// Decibel helpers. Powers use dBm (referenced to 1 mW), gains and
// intercepts plain dB.
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

struct QuadratureSpec {
    double abs_tol = 1e-9;
    double rel_tol = 1e-7;
    int max_subdivisions = 200;
};

// Thrown when adaptive subdivision cannot reach the requested tolerance or
// the integrand misbehaves. Carries the best estimate so far and, for bad
// integrand values, the offending abscissa.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& msg, double partial)
        : std::runtime_error(msg), partial_(partial) {}
    QuadratureError(const std::string& msg, double partial, double abscissa)
        : std::runtime_error(msg), partial_(partial), abscissa_(abscissa) {}
    double partial_estimate() const { return partial_; }
    std::optional<double> abscissa() const { return abscissa_; }

private:
    double partial_ = 0.0;
    std::optional<double> abscissa_;
};

// Evaluates 2F1(1, b; c; z) for c > b > 0 and z <= 0 (the Gauss
// hypergeometric family appearing in interference kernels). Series on
// (-0.5, 0], Pfaff transformation on (-2, -0.5], DLMF 15.8.2 argument
// inversion below that; every branch sums a series with ratio <= 2/3.
// For z < -2 the inversion requires non-integer b; integer b raises
// std::domain_error rather than extrapolating.
double gauss_2f1(double b, double c, double z);

namespace detail {

// 15-point Kronrod nodes (positive half) with embedded 7-point Gauss rule,
// standard QUADPACK constants.
inline constexpr double kGk15Node[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
inline constexpr double kGk15WeightK[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
inline constexpr double kGk15WeightG[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct Segment {
    double lo, hi, value, error;
};

template <class F>
Segment gk15(F&& f, double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kGk15Node[i];
        fv[i] = f(mid - dx);
        fv[14 - i] = f(mid + dx);
    }
    fv[7] = f(mid);
    double kronrod = kGk15WeightK[7] * fv[7];
    double gauss = kGk15WeightG[3] * fv[7];
    for (int i = 0; i < 7; ++i) {
        kronrod += kGk15WeightK[i] * (fv[i] + fv[14 - i]);
        if (i % 2 == 1)
            gauss += kGk15WeightG[i / 2] * (fv[i] + fv[14 - i]);
    }
    for (int i = 0; i < 15; ++i) {
        if (std::isnan(fv[i])) {
            const double x = mid + half * ((i < 7) ? -kGk15Node[i]
                                                   : (i > 7 ? kGk15Node[14 - i] : 0.0));
            char buf[96];
            std::snprintf(buf, sizeof buf, "integrand returned NaN at x = %.17g", x);
            throw QuadratureError(buf, kronrod * half, x);
        }
    }
    return {lo, hi, kronrod * half, std::abs((kronrod - gauss) * half)};
}

template <class F>
double adapt(F&& f, std::vector<Segment>& segs, const QuadratureSpec& spec) {
    int splits = 0;
    for (;;) {
        double value = 0.0, error = 0.0;
        for (const auto& s : segs) {
            value += s.value;
            error += s.error;
        }
        if (error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(value)))
            return value;
        if (splits >= spec.max_subdivisions) {
            char buf[96];
            std::snprintf(buf, sizeof buf,
                          "quadrature did not converge after %d subdivisions", splits);
            throw QuadratureError(buf, value);
        }
        std::size_t worst = 0;
        for (std::size_t i = 1; i < segs.size(); ++i)
            if (segs[i].error > segs[worst].error) worst = i;
        const Segment s = segs[worst];
        const double mid = 0.5 * (s.lo + s.hi);
        segs[worst] = gk15(f, s.lo, mid);
        segs.push_back(gk15(f, mid, s.hi));
        ++splits;
    }
}

}  // namespace detail

// Adaptive Gauss-Kronrod integration of f over [lo, hi]. An infinite upper
// bound is folded onto (0, 1] via r = lo + (1-u)/u. Optional interior
// breakpoints seed the initial subdivision (useful across kinks); they share
// one global error budget. Throws QuadratureError on non-convergence or NaN.
template <class F>
double integrate(F&& f, double lo, double hi, const QuadratureSpec& spec = {},
                 const std::vector<double>& breakpoints = {}) {
    if (!std::isfinite(lo))
        throw std::invalid_argument("integrate: lower bound must be finite");
    if (hi < lo)
        throw std::invalid_argument("integrate: upper bound below lower bound");
    if (hi == lo) return 0.0;

    std::vector<double> knots;
    knots.reserve(breakpoints.size() + 2);
    const bool infinite = std::isinf(hi);
    if (infinite) {
        // u = 1/(1 + (r - lo)) maps [lo, inf) onto (0, 1], reversing order.
        knots.push_back(0.0);
        for (double r : breakpoints)
            if (r > lo && std::isfinite(r)) knots.push_back(1.0 / (1.0 + (r - lo)));
        knots.push_back(1.0);
    } else {
        knots.push_back(lo);
        for (double r : breakpoints)
            if (r > lo && r < hi) knots.push_back(r);
        knots.push_back(hi);
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    auto run = [&](auto&& g) {
        std::vector<detail::Segment> segs;
        segs.reserve(knots.size() - 1);
        for (std::size_t i = 0; i + 1 < knots.size(); ++i)
            segs.push_back(detail::gk15(g, knots[i], knots[i + 1]));
        return detail::adapt(g, segs, spec);
    };
    if (infinite) {
        auto g = [&](double u) {
            const double r = lo + (1.0 - u) / u;
            return f(r) / (u * u);
        };
        return run(g);
    }
    return run(f);
}

}  // namespace hetnet::numerics
