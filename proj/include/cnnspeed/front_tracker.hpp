#pragma once

#include "cnnspeed/dispersion.hpp"
#include "cnnspeed/lattice_sim.hpp"
#include "cnnspeed/speed_solver.hpp"

#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace cnnspeed {

/// Initial plateau half-width used for tracking when no speed is negative.
inline constexpr int kDefaultPlateau = 5;
/// Wider plateau so a retreating level set survives the fit window.
inline constexpr int kRetreatPlateau = 20;

/// Sub-site position of the outermost threshold crossing.
///
/// Rightward: largest p where the linear interpolant of the values (with
/// zero ghosts beyond the window) falls through `threshold`, with values
/// >= threshold just left of p. Leftward is the mirror image. Returns an
/// empty optional when no site reaches the threshold.
/// DomainError unless 0 < threshold < equilibrium.
[[nodiscard]] std::optional<double> front_position(const LatticeState& state, double threshold,
                                                   Direction direction, double equilibrium);

struct FrontSample {
    double t{0.0};
    double position{0.0};
};

struct FrontTrace {
    Direction direction{Direction::Rightward};
    double threshold{0.0};
    /// Every snapshot with a defined front, strictly increasing in t.
    std::vector<FrontSample> samples;
    /// Least-squares slope over the fit window; for Leftward the slope of the
    /// left front is negated so that positive means spreading to the left.
    double fitted_speed{0.0};
    /// RMS deviation of the fitted positions from the fitted line.
    double fit_residual{0.0};
    double fit_start_time{0.0};
    std::size_t fit_count{0};
};

/// Fits the front speed over the last `fit_fraction` of the simulated time.
/// DomainError for bad arguments, InsufficientDataError with fewer than 10
/// snapshots or fewer than 10 defined positions in the fit window.
[[nodiscard]] FrontTrace estimate_speed(std::span<const LatticeState> snapshots, Direction direction,
                                        double threshold, double fit_fraction, double equilibrium);

/// CSV "t,position" followed by "# fitted_speed=<v> residual=<v>".
void write_front_trace_csv(std::ostream& out, const FrontTrace& trace);

struct DichotomyCheck {
    /// Final snapshot time T.
    double time{0.0};
    /// x_i <= 0.05 K ahead of both outer cones (offset by the initial support).
    bool outer_ok{false};
    /// Inner cone -(c_- - m)T <= i <= (c_+ - m)T is nonempty.
    bool inner_checked{false};
    /// x_i >= 0.95 K throughout the inner cone (true when not checked).
    bool inner_ok{true};

    [[nodiscard]] bool holds() const noexcept { return outer_ok && inner_ok; }
};

/// Checks both halves of the spreading dichotomy at the final snapshot.
/// DomainError if the report is for a different template or margin <= 0;
/// InsufficientDataError if the initial data is identically zero.
[[nodiscard]] DichotomyCheck check_spreading_dichotomy(std::span<const LatticeState> snapshots,
                                                       const Template& sim_template,
                                                       const SpeedReport& report, double margin);

[[nodiscard]] bool verify_spreading_dichotomy(std::span<const LatticeState> snapshots,
                                              const Template& sim_template, const SpeedReport& report,
                                              double margin);

/// kRetreatPlateau if either speed in the report is negative, else kDefaultPlateau.
[[nodiscard]] int default_plateau(const SpeedReport& report);

} // namespace cnnspeed
