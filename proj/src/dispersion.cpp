#include "cnnspeed/dispersion.hpp"

#include "cnnspeed/errors.hpp"

#include <cmath>
#include <string>

namespace cnnspeed {

namespace {

// weight * expm1(sign * mu), skipping the exponential when the weight is zero.
double weighted_expm1(double weight, double exponent) {
    if (weight == 0.0) {
        return 0.0;
    }
    const double value = weight * std::expm1(exponent);
    if (!std::isfinite(value)) {
        throw OutOfRangeError("exponential term overflows at mu = " + std::to_string(exponent));
    }
    return value;
}

double weighted_exp(double weight, double exponent) {
    if (weight == 0.0) {
        return 0.0;
    }
    const double value = weight * std::exp(exponent);
    if (!std::isfinite(value)) {
        throw OutOfRangeError("exponential term overflows at mu = " + std::to_string(exponent));
    }
    return value;
}

void require_finite(double mu) {
    if (!std::isfinite(mu)) {
        throw DomainError("mu must be finite");
    }
}

} // namespace

Template::Template(double alpha_, double a_, double beta_) : alpha(alpha_), a(a_), beta(beta_) {
    for (double w : {alpha, a, beta}) {
        if (!std::isfinite(w) || w < 0.0) {
            throw DomainError("template weights must be finite and nonnegative");
        }
    }
}

bool Template::satisfies_h() const noexcept {
    return alpha + beta > 0.0 && alpha + a + beta > 1.0;
}

std::string_view to_string(Direction d) noexcept {
    return d == Direction::Rightward ? "rightward" : "leftward";
}

Direction parse_direction(std::string_view text) {
    if (text == "right" || text == "rightward" || text == "+") {
        return Direction::Rightward;
    }
    if (text == "left" || text == "leftward" || text == "-") {
        return Direction::Leftward;
    }
    throw DomainError("unknown direction '" + std::string(text) + "' (expected right or left)");
}

DispersionCurve::DispersionCurve(const Template& tmpl, Direction direction, double shift)
    : tmpl_(tmpl),
      direction_(direction),
      shift_(shift),
      forward_(direction == Direction::Rightward ? tmpl.alpha : tmpl.beta),
      backward_(direction == Direction::Rightward ? tmpl.beta : tmpl.alpha) {
    if (!std::isfinite(shift)) {
        throw DomainError("curve shift must be finite");
    }
}

double DispersionCurve::h(double mu) const {
    require_finite(mu);
    return unshifted_h(mu) - shift_ * mu;
}

double DispersionCurve::psi(double mu) const {
    require_finite(mu);
    return weighted_exp(forward_, mu) - weighted_exp(backward_, -mu) - shift_;
}

double DispersionCurve::h_second(double mu) const {
    require_finite(mu);
    return weighted_exp(forward_, mu) + weighted_exp(backward_, -mu);
}

double DispersionCurve::phi(double mu) const {
    if (!(mu > 0.0)) {
        throw DomainError("phi is defined for mu > 0 only");
    }
    return h(mu) / mu;
}

double DispersionCurve::g(double mu) const {
    // The shift contributes -c0 mu to both mu h' and h, so it cancels.
    require_finite(mu);
    const double slope = weighted_exp(forward_, mu) - weighted_exp(backward_, -mu);
    return mu * slope - unshifted_h(mu);
}

double DispersionCurve::unshifted_h(double mu) const {
    if (std::abs(mu) <= 1.0) {
        // expm1 keeps h accurate near mu = 0, where a - 1 nearly cancels alpha + beta
        // on the degenerate surface alpha + a + beta = 1.
        const double at_zero = (tmpl_.a - 1.0) + (tmpl_.alpha + tmpl_.beta);
        return at_zero + weighted_expm1(forward_, mu) + weighted_expm1(backward_, -mu);
    }
    // Away from 0 the plain form keeps a decaying term's relative accuracy.
    return (tmpl_.a - 1.0) + weighted_exp(forward_, mu) + weighted_exp(backward_, -mu);
}

double DispersionCurve::lambda(double mu) const {
    const double value = std::exp(h(mu));
    if (!std::isfinite(value)) {
        throw OutOfRangeError("lambda(mu) overflows at mu = " + std::to_string(mu));
    }
    return value;
}

DispersionCurve DispersionCurve::shifted(double c0) const {
    return DispersionCurve(tmpl_, direction_, shift_ + c0);
}

} // namespace cnnspeed
