#include "cnnspeed/front_tracker.hpp"

#include "cnnspeed/errors.hpp"
#include "cnnspeed/io.hpp"

#include <cmath>
#include <string>

namespace cnnspeed {

namespace {

constexpr std::size_t kMinSamples = 10;
constexpr double kDecayLevel = 0.05;
constexpr double kPlateauLevel = 0.95;

} // namespace

std::optional<double> front_position(const LatticeState& state, double threshold, Direction direction,
                                     double equilibrium) {
    if (!(threshold > 0.0 && threshold < equilibrium)) {
        throw DomainError("front threshold must lie in (0, K)");
    }
    const int first = state.first_site();
    const int last = state.last_site();
    auto value = [&](int i) { return (i < first || i > last) ? 0.0 : state.at(i); };

    if (direction == Direction::Rightward) {
        for (int i = last; i >= first; --i) {
            const double here = value(i);
            if (here >= threshold) {
                const double next = value(i + 1);
                return static_cast<double>(i) + (here - threshold) / (here - next);
            }
        }
    } else {
        for (int i = first; i <= last; ++i) {
            const double here = value(i);
            if (here >= threshold) {
                const double prev = value(i - 1);
                return static_cast<double>(i) - (here - threshold) / (here - prev);
            }
        }
    }
    return std::nullopt;
}

FrontTrace estimate_speed(std::span<const LatticeState> snapshots, Direction direction, double threshold,
                          double fit_fraction, double equilibrium) {
    if (!(fit_fraction > 0.0 && fit_fraction < 1.0)) {
        throw DomainError("fit fraction must lie in (0, 1)");
    }
    if (snapshots.size() < kMinSamples) {
        throw InsufficientDataError("need at least 10 snapshots, got " + std::to_string(snapshots.size()));
    }
    FrontTrace trace;
    trace.direction = direction;
    trace.threshold = threshold;
    for (const LatticeState& s : snapshots) {
        if (!trace.samples.empty() && !(s.time > trace.samples.back().t)) {
            throw DomainError("snapshots must be strictly increasing in time");
        }
        if (auto p = front_position(s, threshold, direction, equilibrium)) {
            trace.samples.push_back({s.time, *p});
        }
    }

    const double t0 = snapshots.front().time;
    const double t1 = snapshots.back().time;
    trace.fit_start_time = t1 - fit_fraction * (t1 - t0);

    // Least squares about the window means.
    double sum_t = 0.0;
    double sum_p = 0.0;
    std::size_t count = 0;
    for (const FrontSample& s : trace.samples) {
        if (s.t >= trace.fit_start_time) {
            sum_t += s.t;
            sum_p += s.position;
            ++count;
        }
    }
    if (count < kMinSamples) {
        throw InsufficientDataError(std::string(to_string(direction)) + " front defined at only " +
                                    std::to_string(count) +
                                    " snapshots in the fit window (front died or never formed; "
                                    "try a wider initial plateau)");
    }
    const double mean_t = sum_t / static_cast<double>(count);
    const double mean_p = sum_p / static_cast<double>(count);
    double stt = 0.0;
    double stp = 0.0;
    for (const FrontSample& s : trace.samples) {
        if (s.t >= trace.fit_start_time) {
            stt += (s.t - mean_t) * (s.t - mean_t);
            stp += (s.t - mean_t) * (s.position - mean_p);
        }
    }
    const double slope = stp / stt;
    double sq = 0.0;
    for (const FrontSample& s : trace.samples) {
        if (s.t >= trace.fit_start_time) {
            const double r = s.position - (mean_p + slope * (s.t - mean_t));
            sq += r * r;
        }
    }
    trace.fit_count = count;
    trace.fit_residual = std::sqrt(sq / static_cast<double>(count));
    trace.fitted_speed = direction == Direction::Rightward ? slope : -slope;
    return trace;
}

void write_front_trace_csv(std::ostream& out, const FrontTrace& trace) {
    out << "t,position\n";
    for (const FrontSample& s : trace.samples) {
        out << format_shortest(s.t) << ',' << format_shortest(s.position) << '\n';
    }
    out << "# fitted_speed=" << format_shortest(trace.fitted_speed)
        << " residual=" << format_shortest(trace.fit_residual) << '\n';
}

DichotomyCheck check_spreading_dichotomy(std::span<const LatticeState> snapshots, const Template& sim_template,
                                         const SpeedReport& report, double margin) {
    if (!(margin > 0.0)) {
        throw DomainError("dichotomy margin must be positive");
    }
    if (!(report.tmpl == sim_template)) {
        throw DomainError("speed report belongs to a different template");
    }
    if (snapshots.empty()) {
        throw InsufficientDataError("no snapshots");
    }
    const LatticeState& initial = snapshots.front();
    std::optional<int> support_lo;
    std::optional<int> support_hi;
    for (int i = initial.first_site(); i <= initial.last_site(); ++i) {
        if (initial.at(i) != 0.0) {
            if (!support_lo) support_lo = i;
            support_hi = i;
        }
    }
    if (!support_lo) {
        throw InsufficientDataError("initial data is identically zero; no spreading to verify");
    }

    const double k = sim_template.equilibrium();
    const double c_plus = report.c_plus();
    const double c_minus = report.c_minus();
    const LatticeState& final_state = snapshots.back();
    const double T = final_state.time;

    DichotomyCheck check;
    check.time = T;
    check.outer_ok = true;
    const double right_edge = *support_hi + (c_plus + margin) * T;
    const double left_edge = *support_lo - (c_minus + margin) * T;
    for (int i = final_state.first_site(); i <= final_state.last_site(); ++i) {
        if ((i >= right_edge || i <= left_edge) && final_state.at(i) > kDecayLevel * k) {
            check.outer_ok = false;
            break;
        }
    }

    const double inner_hi = (c_plus - margin) * T;
    const double inner_lo = -(c_minus - margin) * T;
    check.inner_checked = (c_plus - margin) + (c_minus - margin) > 0.0;
    if (check.inner_checked) {
        for (int i = final_state.first_site(); i <= final_state.last_site(); ++i) {
            if (i >= inner_lo && i <= inner_hi && final_state.at(i) < kPlateauLevel * k) {
                check.inner_ok = false;
                break;
            }
        }
    }
    return check;
}

bool verify_spreading_dichotomy(std::span<const LatticeState> snapshots, const Template& sim_template,
                                const SpeedReport& report, double margin) {
    return check_spreading_dichotomy(snapshots, sim_template, report, margin).holds();
}

int default_plateau(const SpeedReport& report) {
    if (report.hypothesis_h && (report.c_plus() < -kZeroSpeedBand || report.c_minus() < -kZeroSpeedBand)) {
        return kRetreatPlateau;
    }
    return kDefaultPlateau;
}

} // namespace cnnspeed
