#pragma once

#include "cnnspeed/dispersion.hpp"

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace cnnspeed {

/// Piecewise-linear CNN output f(u) = (|u + 1| - |u - 1|) / 2.
[[nodiscard]] constexpr double output_f(double u) noexcept {
    return u > 1.0 ? 1.0 : (u < -1.0 ? -1.0 : u);
}

/// Cap on stored snapshot values (snapshots x sites).
inline constexpr std::size_t kMaxStoredValues = 100'000'000;

struct SimConfig {
    Template tmpl;
    /// Sites run over [-L, L]; 0 selects the smallest admissible L.
    int half_width{0};
    double dt{0.01};
    double t_end{60.0};
    /// Initial plateau covers |i| <= w0.
    int init_half_width{5};
    /// Plateau level in (0, K]; empty means K.
    std::optional<double> init_level;
    int snapshot_stride{50};

    /// Smallest L with L > w0 + ceil((K + 2) t_end).
    [[nodiscard]] int minimal_half_width() const;
    [[nodiscard]] int resolved_half_width() const;
    [[nodiscard]] double resolved_init_level() const;
    /// Number of RK4 steps, t_end / dt.
    [[nodiscard]] long long step_count() const;
    /// Throws ConfigError on any violated invariant (dt <= 0.1, window,
    /// t_end a multiple of dt, storage cap, ...).
    void validate() const;
};

/// Snapshot of x_i(t) for i in [-L, L]; values[i + L] holds site i.
struct LatticeState {
    double time{0.0};
    int half_width{0};
    std::vector<double> values;

    LatticeState() = default;
    LatticeState(double time, int half_width);
    LatticeState(double time, int half_width, std::vector<double> values);

    [[nodiscard]] double at(int i) const { return values[static_cast<std::size_t>(i + half_width)]; }
    [[nodiscard]] double& at(int i) { return values[static_cast<std::size_t>(i + half_width)]; }
    [[nodiscard]] int first_site() const noexcept { return -half_width; }
    [[nodiscard]] int last_site() const noexcept { return half_width; }
};

/// Classical RK4 for the lattice right-hand side
///   -x_i + alpha f(x_{i-1}) + a f(x_i) + beta f(x_{i+1}),
/// with x = 0 ghost sites beyond [-L, L]. Holds its stage buffers so that
/// repeated steps do not allocate.
class LatticeIntegrator {
public:
    LatticeIntegrator(const Template& tmpl, double dt, int half_width);

    /// Advances values (size 2L + 1) by one step in place. BlowUpError on
    /// non-finite output.
    void advance(std::span<double> values);

    /// Right-hand side at x, written to out.
    void rhs(std::span<const double> x, std::span<double> out) const;

private:
    Template tmpl_;
    double dt_;
    std::size_t n_;
    std::vector<double> k1_, k2_, k3_, k4_, stage_;
};

/// One RK4 step of size config.dt; the window of `state` is used as is.
[[nodiscard]] LatticeState step(const LatticeState& state, const SimConfig& config);

/// x_i(0) = init_level for |i| <= w0, else 0, on the resolved window.
[[nodiscard]] LatticeState initial_state(const SimConfig& config);

/// Integrates to t_end and returns snapshots every snapshot_stride steps,
/// always including t = 0 and t = t_end. Snapshot times are k * dt.
[[nodiscard]] std::vector<LatticeState> simulate(const SimConfig& config);

/// As above from arbitrary initial data on the resolved window.
[[nodiscard]] std::vector<LatticeState> simulate(const SimConfig& config, LatticeState initial);

/// CSV "t,i,x", ascending t then ascending i.
void write_snapshots_csv(std::ostream& out, std::span<const LatticeState> snapshots);

} // namespace cnnspeed
