#pragma once

#include <string_view>

namespace cnnspeed {

/// Cloning template [alpha, a, beta] of the 1-D cellular neural network
///
///   dx_i/dt = -x_i + alpha f(x_{i-1}) + a f(x_i) + beta f(x_{i+1}).
///
/// alpha couples a cell to its left neighbour (rightward interaction),
/// beta to its right neighbour (leftward interaction), a to itself.
struct Template {
    double alpha{0.0};
    double a{0.0};
    double beta{0.0};

    Template() = default;
    /// Throws DomainError unless all weights are finite and nonnegative.
    Template(double alpha, double a, double beta);

    /// Positive equilibrium K = alpha + a + beta.
    [[nodiscard]] double equilibrium() const noexcept { return alpha + a + beta; }

    /// Monostability hypothesis: alpha + beta > 0 and alpha + a + beta > 1.
    [[nodiscard]] bool satisfies_h() const noexcept;

    /// Template with alpha and beta exchanged (the mirror-image lattice).
    [[nodiscard]] Template swapped() const noexcept { return Template{beta, a, alpha}; }

    friend bool operator==(const Template&, const Template&) = default;
};

enum class Direction { Rightward, Leftward };

[[nodiscard]] constexpr Direction opposite(Direction d) noexcept {
    return d == Direction::Rightward ? Direction::Leftward : Direction::Rightward;
}

[[nodiscard]] std::string_view to_string(Direction d) noexcept;

/// Throws DomainError on anything other than "right"/"rightward"/"+" or
/// "left"/"leftward"/"-".
[[nodiscard]] Direction parse_direction(std::string_view text);

/// Direction-resolved dispersion data of the linearisation at zero.
///
/// Along the profile e^{-mu i} the linear growth rate is
///
///   h(mu) = a - 1 + alpha_eff e^mu + beta_eff e^{-mu} - shift * mu
///
/// where (alpha_eff, beta_eff) = (alpha, beta) for the rightward direction
/// and (beta, alpha) for the leftward one. The principal eigenvalue of the
/// time-one linear map is lambda = e^h, so ln(lambda) is h exactly and
/// every quantity below is computed from h without forming lambda.
///
/// The optional shift implements the reduction lambda(mu) -> e^{-c0 mu}
/// lambda(mu); it lowers Phi and Psi by c0 and leaves g unchanged.
class DispersionCurve {
public:
    DispersionCurve(const Template& tmpl, Direction direction, double shift = 0.0);

    [[nodiscard]] const Template& tmpl() const noexcept { return tmpl_; }
    [[nodiscard]] Direction direction() const noexcept { return direction_; }
    [[nodiscard]] double shift() const noexcept { return shift_; }

    /// Weight multiplying e^mu (alpha for rightward, beta for leftward).
    [[nodiscard]] double forward_weight() const noexcept { return forward_; }
    /// Weight multiplying e^{-mu}.
    [[nodiscard]] double backward_weight() const noexcept { return backward_; }

    [[nodiscard]] double h(double mu) const;
    /// h'(mu); equals lambda'/lambda. Defined on the whole real line.
    [[nodiscard]] double psi(double mu) const;
    /// h''(mu) = alpha_eff e^mu + beta_eff e^{-mu} >= 0.
    [[nodiscard]] double h_second(double mu) const;
    /// h(mu)/mu for mu > 0; DomainError otherwise.
    [[nodiscard]] double phi(double mu) const;
    /// mu h'(mu) - h(mu). Nondecreasing on mu >= 0; zero at an interior minimiser of phi.
    [[nodiscard]] double g(double mu) const;
    /// e^{h(mu)}, diagnostics only. OutOfRangeError when it overflows.
    [[nodiscard]] double lambda(double mu) const;

    /// Same curve with h(mu) replaced by h(mu) - c0 mu (shifts accumulate).
    [[nodiscard]] DispersionCurve shifted(double c0) const;

private:
    [[nodiscard]] double unshifted_h(double mu) const;

    Template tmpl_;
    Direction direction_;
    double shift_;
    double forward_;
    double backward_;
};

} // namespace cnnspeed
