#pragma once

#include "cnnspeed/dispersion.hpp"
#include "cnnspeed/front_tracker.hpp"
#include "cnnspeed/lattice_sim.hpp"
#include "cnnspeed/speed_solver.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace cnnspeed::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kHypothesis = 2,
    kEstimation = 3,
    /// sweep: declared tolerance not met at the final grid point.
    kToleranceNotMet = 4,
};

/// Simulation options shared by simulate and estimate. Unset optionals take
/// their data-dependent defaults (L from the window bound, w0 from the
/// predicted speed signs, level K, threshold K/2).
struct SimOptions {
    double dt{0.01};
    double t_end{60.0};
    int half_width{0};
    std::optional<int> init_half_width;
    std::optional<double> init_level;
    int snapshot_stride{50};
    std::optional<double> threshold;
    double fit_fraction{0.5};
};

struct Comparison {
    SpeedReport report;
    SimConfig config;
    double threshold{0.0};
    FrontTrace plus;
    FrontTrace minus;

    [[nodiscard]] double abs_gap_plus() const;
    [[nodiscard]] double abs_gap_minus() const;
};

/// Solver + simulation + two-sided front tracking for one template.
/// HypothesisError if (H) fails, InsufficientDataError from the tracker.
[[nodiscard]] Comparison compare_with_simulation(const Template& tmpl, const SimOptions& options);

/// Entry point. args excludes the program name. Machine-readable output
/// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cnnspeed::cli
