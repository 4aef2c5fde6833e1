#pragma once

// Test-only oracles and generators. Everything here works from the raw
// formulas and deliberately avoids the library's DispersionCurve/solver code.

#include "cnnspeed/dispersion.hpp"
#include "cnnspeed/lattice_sim.hpp"
#include "cnnspeed/speed_solver.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <limits>
#include <random>
#include <vector>

namespace cnnspeed::testing {

/// Phi from the literal formula (a - 1 + fwd e^mu + bwd e^-mu) / mu.
inline double raw_phi(double fwd, double a, double bwd, double mu) {
    return (a - 1.0 + fwd * std::exp(mu) + bwd * std::exp(-mu)) / mu;
}

inline double raw_g(double fwd, double a, double bwd, double mu) {
    const double h = a - 1.0 + fwd * std::exp(mu) + bwd * std::exp(-mu);
    const double dh = fwd * std::exp(mu) - bwd * std::exp(-mu);
    return mu * dh - h;
}

inline void effective_weights(const Template& t, Direction d, double& fwd, double& bwd) {
    fwd = d == Direction::Rightward ? t.alpha : t.beta;
    bwd = d == Direction::Rightward ? t.beta : t.alpha;
}

struct GridMin {
    double value;
    double mu;
};

/// Brute-force infimum of Phi over a uniform grid of [lo, hi].
inline GridMin grid_infimum(const Template& t, Direction d, double lo = 1e-3, double hi = 50.0, double step = 1e-3) {
    double fwd = 0.0;
    double bwd = 0.0;
    effective_weights(t, d, fwd, bwd);
    GridMin best{std::numeric_limits<double>::infinity(), lo};
    const long n = std::lround((hi - lo) / step);
    for (long k = 0; k <= n; ++k) {
        const double mu = lo + static_cast<double>(k) * step;
        const double v = raw_phi(fwd, t.a, bwd, mu);
        if (v < best.value) {
            best = {v, mu};
        }
    }
    return best;
}

/// Plain bisection on the raw g over [lo, hi] (g(lo) < 0 < g(hi) assumed).
inline double bisect_g(const Template& t, Direction d, double lo, double hi) {
    double fwd = 0.0;
    double bwd = 0.0;
    effective_weights(t, d, fwd, bwd);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (raw_g(fwd, t.a, bwd, mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Random templates satisfying (H). Each of alpha, beta is zeroed with
/// probability 0.15 so the one-sided cases are exercised.
class TemplateGen {
public:
    explicit TemplateGen(std::uint64_t seed, double max_weight = 1.5) : rng_(seed), max_(max_weight) {}

    Template next_h() {
        for (;;) {
            Template t = any();
            if (t.satisfies_h()) {
                return t;
            }
        }
    }

    Template any() {
        std::uniform_real_distribution<double> w(0.0, max_);
        std::bernoulli_distribution zero(0.15);
        const double alpha = zero(rng_) ? 0.0 : w(rng_);
        const double beta = zero(rng_) ? 0.0 : w(rng_);
        return Template{alpha, w(rng_), beta};
    }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    std::mt19937_64& rng() { return rng_; }

private:
    std::mt19937_64 rng_;
    double max_;
};

/// One reachable cell of the sign tables: the expected signs of both speeds
/// and their order (+1: c+ > c-, 0: equal, -1: c- > c+).
struct SignCell {
    std::string name;
    SignClass plus;
    SignClass minus;
    int order;
    std::function<Template(TemplateGen&)> draw;
};

namespace detail {

// 0 < lo < hi, discriminant 2 sqrt(lo hi) + a - 1 with the requested sign.
inline Template two_sided(TemplateGen& gen, int disc, bool alpha_larger) {
    for (;;) {
        const double hi = gen.uniform(0.05, 1.5);
        const double lo = hi * gen.uniform(0.01, 0.9);
        const double a0 = 1.0 - 2.0 * std::sqrt(lo * hi);
        double a = a0;
        if (disc > 0) a = std::max(0.0, a0) + gen.uniform(0.01, 1.0);
        if (disc < 0) a = a0 - gen.uniform(0.001, 0.5);
        if (a < 0.0) continue;
        const Template t = alpha_larger ? Template{hi, a, lo} : Template{lo, a, hi};
        if (t.satisfies_h()) return t;
    }
}

inline Template one_sided(TemplateGen& gen, bool a_at_least_one, bool alpha_present) {
    for (;;) {
        const double w = gen.uniform(0.01, 1.5);
        double a = a_at_least_one ? gen.uniform(1.0, 2.0) : gen.uniform(0.0, 1.0);
        if (a_at_least_one && gen.uniform(0.0, 1.0) < 0.2) a = 1.0;
        if (!a_at_least_one && a >= 1.0) continue;
        const Template t = alpha_present ? Template{w, a, 0.0} : Template{0.0, a, w};
        if (t.satisfies_h()) return t;
    }
}

} // namespace detail

inline const std::vector<SignCell>& sign_cells() {
    using S = SignClass;
    static const std::vector<SignCell> cells = {
        {"alpha>beta>0, disc>0", S::Positive, S::Positive, 1, [](TemplateGen& g) { return detail::two_sided(g, 1, true); }},
        {"alpha=beta>0, disc>0", S::Positive, S::Positive, 0,
         [](TemplateGen& g) {
             for (;;) {
                 const double w = g.uniform(0.01, 1.5);
                 const Template t{w, g.uniform(0.0, 2.0), w};
                 if (t.satisfies_h()) return t;
             }
         }},
        {"beta>alpha>0, disc>0", S::Positive, S::Positive, -1, [](TemplateGen& g) { return detail::two_sided(g, 1, false); }},
        {"alpha>beta>0, disc=0", S::Positive, S::Zero, 1, [](TemplateGen& g) { return detail::two_sided(g, 0, true); }},
        {"beta>alpha>0, disc=0", S::Zero, S::Positive, -1, [](TemplateGen& g) { return detail::two_sided(g, 0, false); }},
        {"alpha>beta>0, disc<0", S::Positive, S::Negative, 1, [](TemplateGen& g) { return detail::two_sided(g, -1, true); }},
        {"beta>alpha>0, disc<0", S::Negative, S::Positive, -1, [](TemplateGen& g) { return detail::two_sided(g, -1, false); }},
        {"alpha>beta=0, a>=1", S::Positive, S::Zero, 1, [](TemplateGen& g) { return detail::one_sided(g, true, true); }},
        {"beta>alpha=0, a>=1", S::Zero, S::Positive, -1, [](TemplateGen& g) { return detail::one_sided(g, true, false); }},
        {"alpha>beta=0, a<1", S::Positive, S::Negative, 1, [](TemplateGen& g) { return detail::one_sided(g, false, true); }},
        {"beta>alpha=0, a<1", S::Negative, S::Positive, -1, [](TemplateGen& g) { return detail::one_sided(g, false, false); }},
    };
    return cells;
}

/// Checks one template against its cell; returns an empty string on success.
inline std::string check_sign_cell(const SignCell& cell, const Template& t) {
    const SpeedReport r = analyze(t);
    if (classify_sign(t, Direction::Rightward) != cell.plus) return "classify_sign(+)";
    if (classify_sign(t, Direction::Leftward) != cell.minus) return "classify_sign(-)";
    if (sign_of(r.c_plus()) != cell.plus) return "sign of solved c+";
    if (sign_of(r.c_minus()) != cell.minus) return "sign of solved c-";
    const double gap = r.c_plus() - r.c_minus();
    const int order = gap > kZeroSpeedBand ? 1 : (gap < -kZeroSpeedBand ? -1 : 0);
    if (order != cell.order) return "order of c+ and c-";
    return {};
}

/// RK4 of the linearised lattice dx_i/dt = -x_i + alpha x_{i-1} + a x_i + beta x_{i+1}
/// with zero ghosts; reference for the nonlinear integrator in the linear regime.
inline std::vector<double> linear_rk4_step(const Template& t, const std::vector<double>& x, double dt) {
    const std::size_t n = x.size();
    auto rhs = [&](const std::vector<double>& y) {
        std::vector<double> out(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double l = j > 0 ? y[j - 1] : 0.0;
            const double r = j + 1 < n ? y[j + 1] : 0.0;
            out[j] = -y[j] + t.alpha * l + t.a * y[j] + t.beta * r;
        }
        return out;
    };
    auto axpy = [&](const std::vector<double>& y, const std::vector<double>& k, double c) {
        std::vector<double> out(n);
        for (std::size_t j = 0; j < n; ++j) out[j] = y[j] + c * k[j];
        return out;
    };
    const auto k1 = rhs(x);
    const auto k2 = rhs(axpy(x, k1, 0.5 * dt));
    const auto k3 = rhs(axpy(x, k2, 0.5 * dt));
    const auto k4 = rhs(axpy(x, k3, dt));
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = x[j] + dt / 6.0 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
    return out;
}

/// Short-run config with the smallest admissible window.
inline SimConfig short_config(const Template& t, double t_end, int w0 = 3, double dt = 0.01, int stride = 10) {
    SimConfig c;
    c.tmpl = t;
    c.dt = dt;
    c.t_end = t_end;
    c.init_half_width = w0;
    c.snapshot_stride = stride;
    return c;
}

/// The five parameter rows of the reference numerical table.
struct TableRow {
    Template tmpl;
    double c_minus_sim;
    double c_plus_sim;
    double c_minus_formula;
    double c_plus_formula;
};

inline const std::vector<TableRow>& table3() {
    static const std::vector<TableRow> rows = {
        {Template{0.5, 1.0, 0.5}, 1.43, 1.43, 1.51, 1.51},
        {Template{0.05, 0.5, 0.5}, 0.69, -0.23, 0.70, -0.23},
        {Template{0.125, 0.5, 0.5}, 0.78, -0.01, 0.80, 0.00},
        {Template{0.0, 1.0, 0.5}, 1.31, 0.00, 1.36, 0.00},
        {Template{0.0, 0.55, 0.5}, 0.73, -0.30, 0.74, -0.29},
    };
    return rows;
}

} // namespace cnnspeed::testing
