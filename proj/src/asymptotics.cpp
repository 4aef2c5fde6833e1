#include "cnnspeed/asymptotics.hpp"

#include "cnnspeed/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace cnnspeed {

namespace {

// Slack for comparisons between independently solved speeds.
constexpr double kSpeedSlack = 1e-9;
constexpr double kFdStep = 1e-5;
constexpr double kFdMargin = 1e-8;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

Template componentwise(const Template& x, const Template& y, bool take_max) {
    auto pick = [take_max](double u, double v) { return take_max ? std::max(u, v) : std::min(u, v); };
    return Template{pick(x.alpha, y.alpha), pick(x.a, y.a), pick(x.beta, y.beta)};
}

} // namespace

TemplateSequence::TemplateSequence(std::vector<Template> entries, const Template& limit,
                                   std::vector<double> labels, double tolerance)
    : entries_(std::move(entries)), labels_(std::move(labels)), limit_(limit), tolerance_(tolerance) {
    if (entries_.empty()) {
        throw DomainError("template sequence must have at least one entry");
    }
    if (!(tolerance_ >= 0.0)) {
        throw DomainError("sequence tolerance must be nonnegative");
    }
    if (labels_.empty()) {
        labels_.reserve(entries_.size());
        for (std::size_t k = 0; k < entries_.size(); ++k) {
            labels_.push_back(static_cast<double>(k + 1));
        }
    } else if (labels_.size() != entries_.size()) {
        throw DomainError("sequence labels and entries differ in length");
    }
    const Template& last = entries_.back();
    const double gap = std::max({std::abs(last.alpha - limit_.alpha), std::abs(last.a - limit_.a),
                                 std::abs(last.beta - limit_.beta)});
    if (gap > tolerance_) {
        throw DomainError("last sequence entry is " + fmt(gap) + " away from the declared limit (tolerance " +
                          fmt(tolerance_) + ")");
    }
}

EnvelopePair envelope(const TemplateSequence& sequence) {
    const auto entries = sequence.entries();
    if (entries.empty()) {
        throw DomainError("envelope of an empty sequence");
    }
    const std::size_t n = entries.size();
    std::vector<Template> upper(n);
    std::vector<Template> lower(n);
    Template running_max = sequence.limit();
    Template running_min = sequence.limit();
    for (std::size_t k = n; k-- > 0;) {
        running_max = componentwise(running_max, entries[k], true);
        running_min = componentwise(running_min, entries[k], false);
        upper[k] = running_max;
        lower[k] = running_min;
    }
    const std::vector<double> labels(sequence.labels().begin(), sequence.labels().end());
    return EnvelopePair{
        TemplateSequence(std::move(upper), sequence.limit(), labels, sequence.tolerance()),
        TemplateSequence(std::move(lower), sequence.limit(), labels, sequence.tolerance()),
    };
}

ContinuityReport verify_speed_continuity(const TemplateSequence& sequence, double eps, double tol) {
    if (!(eps > 0.0)) {
        throw DomainError("continuity tolerance must be positive");
    }
    const Template& limit = sequence.limit();
    if (!limit.satisfies_h()) {
        throw HypothesisError("sequence limit violates (H)");
    }
    ContinuityReport report;
    report.limit_plus = solve_speed(DispersionCurve(limit, Direction::Rightward), tol);
    report.limit_minus = solve_speed(DispersionCurve(limit, Direction::Leftward), tol);

    const EnvelopePair env = envelope(sequence);
    const auto entries = sequence.entries();
    const auto labels = sequence.labels();

    struct Prev {
        double upper_plus, upper_minus, lower_plus, lower_minus;
    };
    std::optional<Prev> prev;

    report.rows.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) {
        ContinuityRow row;
        row.label = labels[k];
        row.valid = entries[k].satisfies_h();
        if (row.valid) {
            row.plus = solve_speed(DispersionCurve(entries[k], Direction::Rightward), tol);
            row.minus = solve_speed(DispersionCurve(entries[k], Direction::Leftward), tol);
            row.abs_error_plus = std::abs(row.plus->speed - report.limit_plus.speed);
            row.abs_error_minus = std::abs(row.minus->speed - report.limit_minus.speed);
        }
        const Template& up = env.upper.entries()[k];
        const Template& lo = env.lower.entries()[k];
        if (up.satisfies_h() && lo.satisfies_h()) {
            const Prev cur{
                solve_speed(DispersionCurve(up, Direction::Rightward), tol).speed,
                solve_speed(DispersionCurve(up, Direction::Leftward), tol).speed,
                solve_speed(DispersionCurve(lo, Direction::Rightward), tol).speed,
                solve_speed(DispersionCurve(lo, Direction::Leftward), tol).speed,
            };
            if (row.valid) {
                row.sandwich_checked = true;
                row.sandwich_ok = cur.lower_plus <= row.plus->speed + kSpeedSlack &&
                                  row.plus->speed <= cur.upper_plus + kSpeedSlack &&
                                  cur.lower_minus <= row.minus->speed + kSpeedSlack &&
                                  row.minus->speed <= cur.upper_minus + kSpeedSlack;
                report.sandwich_holds = report.sandwich_holds && row.sandwich_ok;
            }
            if (prev) {
                const bool monotone = cur.upper_plus <= prev->upper_plus + kSpeedSlack &&
                                      cur.upper_minus <= prev->upper_minus + kSpeedSlack &&
                                      cur.lower_plus >= prev->lower_plus - kSpeedSlack &&
                                      cur.lower_minus >= prev->lower_minus - kSpeedSlack;
                report.envelope_monotone = report.envelope_monotone && monotone;
            }
            prev = cur;
        }
        report.rows.push_back(std::move(row));
    }
    const ContinuityRow& last = report.rows.back();
    report.converged = last.valid && last.abs_error_plus <= eps && last.abs_error_minus <= eps;
    return report;
}

ParametrizedTemplate::ParametrizedTemplate(Map map, double s0) : map_(std::move(map)), s0_(s0) {
    if (!map_) {
        throw DomainError("parametrized template needs a map");
    }
    if (!(s0_ > 0.0)) {
        throw DomainError("s0 must be positive");
    }
    validate();
}

ParametrizedTemplate ParametrizedTemplate::special_model(const Template& base, double s0) {
    return ParametrizedTemplate(
        [base](double s) { return Template{base.alpha, base.a, base.beta + s}; }, s0);
}

Template ParametrizedTemplate::at(double s) const {
    if (!(s >= 0.0 && s < s0_)) {
        throw DomainError("s = " + fmt(s) + " outside [0, " + fmt(s0_) + ")");
    }
    return map_(s);
}

DispersionCurve ParametrizedTemplate::curve(double s, Direction direction) const {
    return DispersionCurve(at(s), direction);
}

void ParametrizedTemplate::validate() const {
    // Structure of the path on a uniform sample of [0, min(s0, 1)).
    const double s_hi = std::min(s0_, 1.0);
    constexpr int kSamples = 32;
    Template prev = at(0.0);
    for (int k = 1; k < kSamples; ++k) {
        const double s = s_hi * k / kSamples;
        const Template cur = at(s);
        if (cur.alpha < prev.alpha || cur.a < prev.a || cur.beta < prev.beta ||
            !(cur.equilibrium() > prev.equilibrium())) {
            throw HypothesisError("template path is not increasing in s near s = " + fmt(s));
        }
        prev = cur;
    }

    const Template base = at(0.0);
    if (!(base.alpha + base.beta > 0.0)) {
        throw HypothesisError("limit template at s = 0 needs alpha + beta > 0");
    }
    if (std::abs(base.equilibrium() - 1.0) > kFdMargin) {
        throw HypothesisError("limit template at s = 0 must satisfy alpha + a + beta = 1, got " +
                              fmt(base.equilibrium()));
    }

    const double ds = std::min(kFdStep, 0.5 * s0_);
    for (Direction d : {Direction::Rightward, Direction::Leftward}) {
        const DispersionCurve at_zero = curve(0.0, d);
        const double lambda00 = at_zero.lambda(0.0);
        if (std::abs(lambda00 - 1.0) > kFdMargin) {
            throw HypothesisError("Lambda(0,0) = " + fmt(lambda00) + " differs from 1");
        }
        const double lambda_s = (curve(ds, d).lambda(0.0) - lambda00) / ds;
        if (!(lambda_s > kFdMargin)) {
            throw HypothesisError("Lambda_s(0,0) must be positive, got " + fmt(lambda_s));
        }
        const double h_mm = (at_zero.h(kFdStep) - 2.0 * at_zero.h(0.0) + at_zero.h(-kFdStep)) /
                            (kFdStep * kFdStep);
        if (!(h_mm > kFdMargin)) {
            throw HypothesisError("(ln Lambda)_mumu(0,0) must be positive, got " + fmt(h_mm));
        }
        // Discrete convexity of ln Lambda in mu for a few s.
        for (double frac : {0.0, 0.25, 0.5, 0.75}) {
            const DispersionCurve c = curve(frac * s_hi, d);
            constexpr double kMuStep = 0.25;
            for (int j = 1; j < 40; ++j) {
                const double mu = j * kMuStep;
                const double left = c.h(mu - kMuStep);
                const double mid = c.h(mu);
                const double right = c.h(mu + kMuStep);
                const double scale = std::max({1.0, std::abs(left), std::abs(right)});
                if (left - 2.0 * mid + right < -kFdMargin * scale) {
                    throw HypothesisError("ln Lambda is not convex in mu at s = " + fmt(frac * s_hi));
                }
            }
        }
    }
}

double eval_G(const ParametrizedTemplate& p, double s, double mu, Direction direction) {
    if (!(mu >= 0.0)) {
        throw DomainError("G is evaluated for mu >= 0 only");
    }
    return p.curve(s, direction).g(mu);
}

LimitPath limiting_speed_path(const ParametrizedTemplate& p, std::span<const double> s_values,
                              Direction direction, double tol) {
    if (s_values.empty()) {
        throw DomainError("s grid is empty");
    }
    for (std::size_t k = 0; k < s_values.size(); ++k) {
        const double s = s_values[k];
        if (!(s > 0.0 && s < p.s0())) {
            throw DomainError("s = " + fmt(s) + " outside (0, s0)");
        }
        if (k > 0 && !(s < s_values[k - 1])) {
            throw DomainError("s grid must be strictly decreasing");
        }
    }

    LimitPath path;
    path.direction = direction;
    path.limit_value = p.curve(0.0, direction).psi(0.0);
    path.points.reserve(s_values.size());
    for (double s : s_values) {
        const Template t = p.at(s);
        if (!t.satisfies_h()) {
            throw HypothesisError("p(s) violates (H) at s = " + fmt(s));
        }
        const SpeedSolution sol = solve_speed(DispersionCurve(t, direction), tol);
        LimitPoint pt{s, sol.speed, sol.minimizer.mu_star};
        if (!path.points.empty()) {
            const LimitPoint& before = path.points.back();
            if (!(pt.mu_star < before.mu_star)) {
                path.mu_star_decreasing = false;
            }
            if (std::abs(pt.speed - path.limit_value) > std::abs(before.speed - path.limit_value)) {
                path.speed_approaching = false;
            }
        }
        path.points.push_back(pt);
    }
    path.final_abs_error = std::abs(path.points.back().speed - path.limit_value);
    return path;
}

std::vector<double> geometric_s_grid(int k) {
    if (k < 1) {
        throw DomainError("geometric grid needs at least one point");
    }
    std::vector<double> s;
    s.reserve(static_cast<std::size_t>(k));
    for (int j = 1; j <= k; ++j) {
        s.push_back(std::pow(10.0, -j));
    }
    return s;
}

} // namespace cnnspeed
