#include "cnnspeed/speed_solver.hpp"

#include "cnnspeed/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace cnnspeed {

namespace {

constexpr double kInitialLower = 1e-6;
constexpr double kInitialUpper = 1.0;
// Beyond this e^mu is within a factor ~2 of overflow.
constexpr double kMaxBracket = 700.0;
constexpr double kWidthTolerance = 1e-13;

std::string describe(const Template& t) {
    std::ostringstream os;
    os.precision(17);
    os << "[alpha=" << t.alpha << ", a=" << t.a << ", beta=" << t.beta << "]";
    return os.str();
}

void require_h(const Template& t) {
    if (!t.satisfies_h()) {
        throw HypothesisError("template " + describe(t) +
                              " violates (H): need alpha+beta > 0 and alpha+a+beta > 1");
    }
}

// Root of the nondecreasing function g on (0, inf), given g(0) < 0 and g > 0
// somewhere to the right. Bisection is run until the bracket is narrow and
// |g| <= tol, or until it cannot be split any further in floating point.
double root_of_g(const DispersionCurve& curve, double tol) {
    double lo = kInitialLower;
    while (curve.g(lo) >= 0.0) {
        // Root below the initial lower end (only for minimisers very close to 0).
        lo *= 0.5;
        if (lo < std::numeric_limits<double>::min()) {
            return lo;
        }
    }
    double hi = std::max(kInitialUpper, 2.0 * lo);
    while (curve.g(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > kMaxBracket) {
            throw OutOfRangeError("minimiser of phi lies beyond mu = 700 for template " +
                                  describe(curve.tmpl()));
        }
    }
    for (;;) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) {
            return mid;
        }
        const double g_mid = curve.g(mid);
        if (hi - lo <= kWidthTolerance * std::max(1.0, hi) && std::abs(g_mid) <= tol) {
            return mid;
        }
        if (g_mid < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

} // namespace

std::string_view to_string(SignClass s) noexcept {
    switch (s) {
    case SignClass::Positive:
        return "positive";
    case SignClass::Zero:
        return "zero";
    case SignClass::Negative:
        return "negative";
    }
    return "zero";
}

SignClass sign_of(double speed, double band) noexcept {
    if (speed > band) {
        return SignClass::Positive;
    }
    if (speed < -band) {
        return SignClass::Negative;
    }
    return SignClass::Zero;
}

SpeedSolution solve_speed(const DispersionCurve& curve, double tol) {
    if (!(tol > 0.0)) {
        throw DomainError("root tolerance must be positive");
    }
    const Template& t = curve.tmpl();
    require_h(t);

    if (curve.forward_weight() == 0.0 && t.a >= 1.0) {
        // Phi decreases monotonically to its limit -shift; g < 0 throughout.
        const double limit = 0.0 - curve.shift();
        return {limit, Minimizer{Minimizer::Kind::AtInfinity,
                                 std::numeric_limits<double>::infinity(), limit}};
    }
    // Either forward weight > 0 (g -> +inf) or a < 1 (g -> 1 - a > 0).
    const double mu_star = root_of_g(curve, tol);
    const double value = curve.phi(mu_star);
    return {value, Minimizer{Minimizer::Kind::Interior, mu_star, value}};
}

SignClass classify_sign(const Template& tmpl, Direction direction) {
    require_h(tmpl);
    const DispersionCurve curve(tmpl, direction);
    const double fwd = curve.forward_weight();
    const double bwd = curve.backward_weight();

    if (fwd == 0.0) {
        return tmpl.a >= 1.0 ? SignClass::Zero : SignClass::Negative;
    }
    if (fwd >= bwd) {
        // min of h over the real line sits at mu <= 0, so inf over mu > 0 is h(0) > 0.
        return SignClass::Positive;
    }
    // h attains its minimum 2 sqrt(fwd bwd) + a - 1 at mu0 = ln(bwd/fwd)/2 > 0.
    const double h0 = 2.0 * std::sqrt(fwd * bwd) + tmpl.a - 1.0;
    constexpr double kDiscriminantBand = 64 * std::numeric_limits<double>::epsilon();
    if (std::abs(h0) <= kDiscriminantBand) {
        return SignClass::Zero;
    }
    return h0 > 0.0 ? SignClass::Positive : SignClass::Negative;
}

const DirectionalSpeed& SpeedReport::in(Direction d) const {
    const auto& slot = d == Direction::Rightward ? plus : minus;
    if (!slot) {
        throw HypothesisError("no spreading speed: template " + describe(tmpl) + " violates (H)");
    }
    return *slot;
}

SpeedReport analyze(const Template& tmpl, double tol) {
    SpeedReport report;
    report.tmpl = tmpl;
    report.hypothesis_h = tmpl.satisfies_h();
    if (!report.hypothesis_h) {
        return report;
    }
    for (Direction d : {Direction::Rightward, Direction::Leftward}) {
        const SpeedSolution sol = solve_speed(DispersionCurve(tmpl, d), tol);
        const SignClass closed_form = classify_sign(tmpl, d);
        const bool contradicts =
            (closed_form == SignClass::Positive && sol.speed < -kZeroSpeedBand) ||
            (closed_form == SignClass::Negative && sol.speed > kZeroSpeedBand) ||
            (closed_form == SignClass::Zero && std::abs(sol.speed) > kZeroSpeedBand);
        if (contradicts) {
            std::ostringstream os;
            os.precision(17);
            os << "sign class " << to_string(closed_form) << " contradicts " << to_string(d)
               << " speed " << sol.speed << " for template " << describe(tmpl);
            throw ConsistencyError(os.str());
        }
        DirectionalSpeed ds{sol.speed, sol.minimizer, closed_form};
        (d == Direction::Rightward ? report.plus : report.minus) = ds;
    }
    return report;
}

} // namespace cnnspeed
