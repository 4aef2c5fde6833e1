#pragma once

#include "cnnspeed/dispersion.hpp"
#include "cnnspeed/speed_solver.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace cnnspeed {

/// Finite prefix of a template sequence together with its declared limit.
///
/// labels[k] is the sequence index n of entries[k] (defaults to 1, 2, ...).
/// The constructor checks that the last entry lies within `tolerance` of
/// the limit in every component; this is the only finite evidence of
/// convergence available.
class TemplateSequence {
public:
    TemplateSequence(std::vector<Template> entries, const Template& limit,
                     std::vector<double> labels = {}, double tolerance = 1e-2);

    [[nodiscard]] std::span<const Template> entries() const noexcept { return entries_; }
    [[nodiscard]] std::span<const double> labels() const noexcept { return labels_; }
    [[nodiscard]] const Template& limit() const noexcept { return limit_; }
    [[nodiscard]] double tolerance() const noexcept { return tolerance_; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }

private:
    std::vector<Template> entries_;
    std::vector<double> labels_;
    Template limit_;
    double tolerance_;
};

/// Componentwise tail envelopes: upper_n = max(limit, max_{k>=n} x_k),
/// lower_n = min(limit, min_{k>=n} x_k).
struct EnvelopePair {
    TemplateSequence upper;
    TemplateSequence lower;
};

/// Throws DomainError on an empty sequence.
[[nodiscard]] EnvelopePair envelope(const TemplateSequence& sequence);

struct ContinuityRow {
    double label{0.0};
    /// Entry satisfies (H); speeds below are only meaningful when true.
    bool valid{false};
    std::optional<SpeedSolution> plus;
    std::optional<SpeedSolution> minus;
    double abs_error_plus{0.0};
    double abs_error_minus{0.0};
    /// Both envelope templates satisfy (H), so the sandwich was checked.
    bool sandwich_checked{false};
    bool sandwich_ok{true};
};

struct ContinuityReport {
    SpeedSolution limit_plus;
    SpeedSolution limit_minus;
    std::vector<ContinuityRow> rows;
    /// Last entry within eps of the limit speeds in both directions.
    bool converged{false};
    /// lower_n speed <= c_n <= upper_n speed wherever checked.
    bool sandwich_holds{true};
    /// Envelope speeds monotone in n (upper nonincreasing, lower nondecreasing).
    bool envelope_monotone{true};
};

/// Solves every entry, its envelopes and the limit, and checks the sandwich
/// bound. Entries failing (H) are reported with valid = false.
/// Throws HypothesisError if the limit violates (H).
[[nodiscard]] ContinuityReport verify_speed_continuity(const TemplateSequence& sequence, double eps,
                                                       double tol = kDefaultRootTolerance);

/// Template path s -> p(s) on [0, s0) approaching the degenerate surface
/// alpha + a + beta = 1 as s -> 0+.
///
/// Construction validates, on a sample of s and mu values:
///  - components nondecreasing in s with strictly increasing sum;
///  - p(0) has alpha + beta > 0 and alpha + a + beta = 1;
///  - Lambda(s, mu) = e^{h_s(mu)} has Lambda(0,0) = 1, Lambda_s(0,0) > 0,
///    ln Lambda convex in mu, (ln Lambda)_{mu mu}(0,0) > 0,
/// using finite differences with step 1e-5 and margin 1e-8.
/// Violations throw HypothesisError.
class ParametrizedTemplate {
public:
    using Map = std::function<Template(double)>;

    ParametrizedTemplate(Map map, double s0);

    /// [alpha, a, beta + s]; base must lie on alpha + a + beta = 1.
    [[nodiscard]] static ParametrizedTemplate special_model(const Template& base, double s0 = 1.0);

    /// DomainError unless 0 <= s < s0.
    [[nodiscard]] Template at(double s) const;
    [[nodiscard]] DispersionCurve curve(double s, Direction direction) const;
    [[nodiscard]] double s0() const noexcept { return s0_; }

private:
    void validate() const;

    Map map_;
    double s0_;
};

/// G(s, mu) = mu H_mu(s, mu) - H(s, mu) with H(s, .) the dispersion of p(s).
[[nodiscard]] double eval_G(const ParametrizedTemplate& p, double s, double mu, Direction direction);

struct LimitPoint {
    double s{0.0};
    double speed{0.0};
    double mu_star{0.0};
};

struct LimitPath {
    Direction direction{Direction::Rightward};
    std::vector<LimitPoint> points;
    /// Psi(0, 0) of the direction-resolved curve: +-(alpha - beta) at s = 0.
    double limit_value{0.0};
    /// mu*(s) strictly decreases along the (decreasing) s grid.
    bool mu_star_decreasing{true};
    /// |c(s) - limit_value| is nonincreasing along the grid.
    bool speed_approaching{true};
    double final_abs_error{0.0};
};

/// Speeds and interior minimisers along a strictly decreasing s grid in (0, s0).
/// DomainError for a bad grid; HypothesisError naming s if p(s) fails (H).
[[nodiscard]] LimitPath limiting_speed_path(const ParametrizedTemplate& p, std::span<const double> s_values,
                                            Direction direction, double tol = kDefaultRootTolerance);

/// s = 10^{-1}, ..., 10^{-k}.
[[nodiscard]] std::vector<double> geometric_s_grid(int k = 5);

} // namespace cnnspeed
