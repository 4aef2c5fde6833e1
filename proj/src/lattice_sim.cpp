#include "cnnspeed/lattice_sim.hpp"

#include "cnnspeed/errors.hpp"
#include "cnnspeed/io.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace cnnspeed {

namespace {

constexpr double kMaxDt = 0.1;

} // namespace

int SimConfig::minimal_half_width() const {
    const double reach = std::ceil((tmpl.equilibrium() + 2.0) * t_end);
    return init_half_width + static_cast<int>(reach) + 1;
}

int SimConfig::resolved_half_width() const {
    return half_width == 0 ? minimal_half_width() : half_width;
}

double SimConfig::resolved_init_level() const {
    return init_level.value_or(tmpl.equilibrium());
}

long long SimConfig::step_count() const {
    return std::llround(t_end / dt);
}

void SimConfig::validate() const {
    if (!(dt > 0.0) || dt > kMaxDt) {
        throw ConfigError("dt must lie in (0, 0.1]");
    }
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw ConfigError("t_end must be positive");
    }
    const long long steps = step_count();
    if (steps < 1 || std::abs(static_cast<double>(steps) * dt - t_end) > 1e-9 * t_end) {
        throw ConfigError("t_end must be a whole number of steps dt");
    }
    if (init_half_width < 0) {
        throw ConfigError("initial half-width must be nonnegative");
    }
    if (snapshot_stride < 1) {
        throw ConfigError("snapshot stride must be positive");
    }
    const double k = tmpl.equilibrium();
    const double level = resolved_init_level();
    if (!(level > 0.0 && level <= k)) {
        throw ConfigError("initial level must lie in (0, K]");
    }
    if (half_width < 0) {
        throw ConfigError("half-width must be nonnegative (0 selects it automatically)");
    }
    // Ceil of the reach is computed in double to avoid int overflow on absurd input.
    const double reach = init_half_width + std::ceil((k + 2.0) * t_end);
    if (reach > static_cast<double>(std::numeric_limits<int>::max() / 4)) {
        throw ConfigError("window would be too large");
    }
    if (!(static_cast<double>(resolved_half_width()) > reach)) {
        throw ConfigError("window half-width " + std::to_string(resolved_half_width()) +
                          " must exceed w0 + ceil((K+2) t_end) = " +
                          std::to_string(static_cast<long long>(reach)));
    }
    const auto sites = static_cast<double>(2 * resolved_half_width() + 1);
    const auto snapshots = static_cast<double>(steps / snapshot_stride + 2);
    if (sites * snapshots > static_cast<double>(kMaxStoredValues)) {
        throw ConfigError("snapshots would store more than 1e8 values; raise the stride");
    }
}

LatticeState::LatticeState(double t, int L)
    : time(t), half_width(L), values(static_cast<std::size_t>(2 * L + 1), 0.0) {}

LatticeState::LatticeState(double t, int L, std::vector<double> v)
    : time(t), half_width(L), values(std::move(v)) {
    if (values.size() != static_cast<std::size_t>(2 * L + 1)) {
        throw DomainError("lattice state needs 2L + 1 values");
    }
}

LatticeIntegrator::LatticeIntegrator(const Template& tmpl, double dt, int half_width)
    : tmpl_(tmpl),
      dt_(dt),
      n_(static_cast<std::size_t>(2 * half_width + 1)),
      k1_(n_),
      k2_(n_),
      k3_(n_),
      k4_(n_),
      stage_(n_) {}

void LatticeIntegrator::rhs(std::span<const double> x, std::span<double> out) const {
    const std::size_t n = x.size();
    const double alpha = tmpl_.alpha;
    const double a = tmpl_.a;
    const double beta = tmpl_.beta;
    for (std::size_t j = 0; j < n; ++j) {
        const double left = j > 0 ? output_f(x[j - 1]) : 0.0;
        const double right = j + 1 < n ? output_f(x[j + 1]) : 0.0;
        out[j] = -x[j] + alpha * left + a * output_f(x[j]) + beta * right;
    }
}

void LatticeIntegrator::advance(std::span<double> x) {
    if (x.size() != n_) {
        throw DomainError("state size does not match the integrator window");
    }
    const double h = dt_;
    rhs(x, k1_);
    for (std::size_t j = 0; j < n_; ++j) stage_[j] = x[j] + 0.5 * h * k1_[j];
    rhs(stage_, k2_);
    for (std::size_t j = 0; j < n_; ++j) stage_[j] = x[j] + 0.5 * h * k2_[j];
    rhs(stage_, k3_);
    for (std::size_t j = 0; j < n_; ++j) stage_[j] = x[j] + h * k3_[j];
    rhs(stage_, k4_);
    bool finite = true;
    for (std::size_t j = 0; j < n_; ++j) {
        x[j] += h / 6.0 * (k1_[j] + 2.0 * k2_[j] + 2.0 * k3_[j] + k4_[j]);
        finite = finite && std::isfinite(x[j]);
    }
    if (!finite) {
        throw BlowUpError("lattice integration produced a non-finite value");
    }
}

LatticeState step(const LatticeState& state, const SimConfig& config) {
    if (!(config.dt > 0.0) || config.dt > kMaxDt) {
        throw ConfigError("dt must lie in (0, 0.1]");
    }
    LatticeState next = state;
    LatticeIntegrator integrator(config.tmpl, config.dt, state.half_width);
    integrator.advance(next.values);
    next.time = state.time + config.dt;
    return next;
}

LatticeState initial_state(const SimConfig& config) {
    config.validate();
    LatticeState s(0.0, config.resolved_half_width());
    const double level = config.resolved_init_level();
    for (int i = -config.init_half_width; i <= config.init_half_width; ++i) {
        s.at(i) = level;
    }
    return s;
}

std::vector<LatticeState> simulate(const SimConfig& config) {
    return simulate(config, initial_state(config));
}

std::vector<LatticeState> simulate(const SimConfig& config, LatticeState initial) {
    config.validate();
    if (initial.half_width != config.resolved_half_width()) {
        throw ConfigError("initial state window does not match the configuration");
    }
    const long long steps = config.step_count();
    std::vector<LatticeState> snapshots;
    snapshots.reserve(static_cast<std::size_t>(steps / config.snapshot_stride + 2));

    initial.time = 0.0;
    snapshots.push_back(initial);
    LatticeIntegrator integrator(config.tmpl, config.dt, initial.half_width);
    LatticeState current = std::move(initial);
    for (long long k = 1; k <= steps; ++k) {
        integrator.advance(current.values);
        current.time = static_cast<double>(k) * config.dt;
        if (k % config.snapshot_stride == 0 || k == steps) {
            snapshots.push_back(current);
        }
    }
    return snapshots;
}

void write_snapshots_csv(std::ostream& out, std::span<const LatticeState> snapshots) {
    out << "t,i,x\n";
    for (const LatticeState& s : snapshots) {
        const std::string t = format_shortest(s.time);
        for (int i = s.first_site(); i <= s.last_site(); ++i) {
            out << t << ',' << i << ',' << format_shortest(s.at(i)) << '\n';
        }
    }
}

} // namespace cnnspeed
