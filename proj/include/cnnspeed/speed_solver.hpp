#pragma once

#include "cnnspeed/dispersion.hpp"

#include <optional>
#include <string_view>

namespace cnnspeed {

/// Default tolerance on |g(mu*)|.
inline constexpr double kDefaultRootTolerance = 1e-10;
/// Speeds with |c| <= this band are reported as zero.
inline constexpr double kZeroSpeedBand = 1e-9;

/// Where inf_{mu>0} Phi is attained.
struct Minimizer {
    enum class Kind { Interior, AtInfinity };

    Kind kind{Kind::Interior};
    /// Finite root of g for Interior, +infinity for AtInfinity.
    double mu_star{0.0};
    /// Phi(mu*) for Interior, lim Phi = lim Psi for AtInfinity.
    double phi_value{0.0};

    [[nodiscard]] bool interior() const noexcept { return kind == Kind::Interior; }
};

enum class SignClass { Positive, Zero, Negative };

[[nodiscard]] std::string_view to_string(SignClass s) noexcept;

/// Sign of a numeric speed, with |speed| <= band mapped to Zero.
[[nodiscard]] SignClass sign_of(double speed, double band = kZeroSpeedBand) noexcept;

struct SpeedSolution {
    double speed{0.0};
    Minimizer minimizer;
};

/// Spreading speed c* = inf_{mu>0} Phi(mu) of one direction-resolved curve.
///
/// With a positive forward weight Phi(+inf) = +inf and the infimum is the
/// value of Phi at the unique root of g, located by bracket expansion and
/// bisection. With a zero forward weight Phi(mu) -> -shift: for a >= 1 the
/// infimum is that limit (AtInfinity), for a < 1 g changes sign and the
/// infimum is again interior and lies below the limit.
///
/// Throws HypothesisError when the template violates (H), DomainError when
/// tol <= 0, OutOfRangeError if the root bracket leaves the exponent range.
[[nodiscard]] SpeedSolution solve_speed(const DispersionCurve& curve,
                                        double tol = kDefaultRootTolerance);

/// Closed-form sign of the spreading speed in one direction, no minimisation.
[[nodiscard]] SignClass classify_sign(const Template& tmpl, Direction direction);

struct DirectionalSpeed {
    double speed{0.0};
    Minimizer minimizer;
    /// Closed-form class (authoritative; checked against speed by analyze).
    SignClass sign{SignClass::Zero};
};

/// Both spreading speeds of a template. The directional fields are empty
/// when the template fails (H).
struct SpeedReport {
    Template tmpl;
    bool hypothesis_h{false};
    std::optional<DirectionalSpeed> plus;
    std::optional<DirectionalSpeed> minus;

    /// Throws HypothesisError when no speed was computed.
    [[nodiscard]] const DirectionalSpeed& in(Direction d) const;
    [[nodiscard]] double c_plus() const { return in(Direction::Rightward).speed; }
    [[nodiscard]] double c_minus() const { return in(Direction::Leftward).speed; }
};

/// Solves and classifies both directions. Raises ConsistencyError if a
/// closed-form sign contradicts the numeric speed beyond kZeroSpeedBand.
[[nodiscard]] SpeedReport analyze(const Template& tmpl, double tol = kDefaultRootTolerance);

} // namespace cnnspeed
