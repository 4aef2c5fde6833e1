#include "cnnspeed/errors.hpp"
#include "cnnspeed/speed_solver.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace cnnspeed;
using cnnspeed::testing::grid_infimum;
using cnnspeed::testing::TemplateGen;

namespace {

struct Frozen {
    Template tmpl;
    Direction dir;
    double mu_star; // NaN for a minimiser at infinity
    double speed;
};

// Reference values computed independently at 30 significant digits.
const std::vector<Frozen>& frozen() {
    static const std::vector<Frozen> rows = {
        {{0.5, 1.0, 0.5}, Direction::Rightward, 1.19967864025773383391636984864, 1.50887956153831992890988448816},
        {{0.5, 1.0, 0.5}, Direction::Leftward, 1.19967864025773383391636984864, 1.50887956153831992890988448816},
        {{0.05, 0.5, 0.5}, Direction::Rightward, 0.479560141645183289630394326208, -0.228759628625776730420732570125},
        {{0.05, 0.5, 0.5}, Direction::Leftward, 0.381695773208254743418826781328, 0.698248062176246354548269347487},
        {{0.125, 0.5, 0.5}, Direction::Rightward, 0.693147180559945309417232121458, 0.0},
        {{0.125, 0.5, 0.5}, Direction::Leftward, 0.553404866948717601068427020503, 0.797708696852758230565232023907},
        {{0.0, 1.0, 0.5}, Direction::Rightward, NAN, 0.0},
        {{0.0, 1.0, 0.5}, Direction::Leftward, 1.0, 1.35914091422952261768014373568},
        {{0.0, 0.55, 0.5}, Direction::Rightward, 0.531811608389612304398757231096, -0.29376980663639390847643730572},
        {{0.0, 0.55, 0.5}, Direction::Leftward, 0.391658715266568282722700153744, 0.739716358716612296066763257384},
    };
    return rows;
}

Template bump(Template t, int which, double d) {
    (which == 0 ? t.alpha : which == 1 ? t.a : t.beta) += d;
    return t;
}

} // namespace

TEST_CASE("frozen reference speeds and minimisers") {
    for (const Frozen& f : frozen()) {
        CAPTURE(f.tmpl.alpha);
        CAPTURE(f.tmpl.a);
        CAPTURE(f.tmpl.beta);
        const SpeedSolution s = solve_speed(DispersionCurve(f.tmpl, f.dir));
        CHECK(s.speed == doctest::Approx(f.speed).epsilon(1e-10).scale(1.0));
        if (std::isnan(f.mu_star)) {
            CHECK(s.minimizer.kind == Minimizer::Kind::AtInfinity);
            CHECK(std::isinf(s.minimizer.mu_star));
            CHECK_FALSE(std::signbit(s.speed));
        } else {
            REQUIRE(s.minimizer.interior());
            CHECK(s.minimizer.mu_star == doctest::Approx(f.mu_star).epsilon(1e-8));
        }
    }
}

TEST_CASE("symmetric template has equal speeds and cosh minimiser") {
    const SpeedReport r = analyze(Template{0.5, 1.0, 0.5});
    CHECK(r.c_plus() == r.c_minus());
    CHECK(r.in(Direction::Rightward).sign == SignClass::Positive);
    const double mu = r.plus->minimizer.mu_star;
    CHECK(std::abs(std::cosh(mu) - mu * std::sinh(mu)) <= 1e-9);
}

TEST_CASE("analyze signs on the reference rows") {
    CHECK(analyze(Template{0.05, 0.5, 0.5}).plus->sign == SignClass::Negative);
    CHECK(analyze(Template{0.125, 0.5, 0.5}).plus->sign == SignClass::Zero);
    CHECK(analyze(Template{0.0, 1.0, 0.5}).plus->sign == SignClass::Zero);
    CHECK(analyze(Template{0.0, 0.55, 0.5}).plus->sign == SignClass::Negative);
    CHECK(analyze(Template{0.0, 0.55, 0.5}).minus->sign == SignClass::Positive);
}

TEST_CASE("dense-grid oracle on the reference rows") {
    for (const Frozen& f : frozen()) {
        const SpeedSolution s = solve_speed(DispersionCurve(f.tmpl, f.dir));
        const auto grid = grid_infimum(f.tmpl, f.dir);
        CHECK(s.speed <= grid.value + 1e-12);
        if (s.minimizer.interior()) {
            CHECK(std::abs(s.speed - grid.value) <= 1e-6);
        }
    }
}

TEST_CASE("minimiser invariants") {
    for (const Frozen& f : frozen()) {
        const DispersionCurve c(f.tmpl, f.dir);
        const SpeedSolution s = solve_speed(c);
        if (!s.minimizer.interior()) continue;
        const double mu = s.minimizer.mu_star;
        CHECK(std::abs(c.g(mu)) <= kDefaultRootTolerance);
        CHECK(std::abs(c.phi(mu) - c.psi(mu)) <= 1e-8);
        CHECK(s.minimizer.phi_value == s.speed);
    }
}

TEST_CASE("moving frame shifts the speed") {
    const DispersionCurve c(Template{0.05, 0.5, 0.5}, Direction::Leftward);
    const double base = solve_speed(c).speed;
    for (double c0 : {-1.0, 0.3, 2.5}) {
        const SpeedSolution s = solve_speed(c.shifted(c0));
        CHECK(s.speed == doctest::Approx(base - c0).epsilon(1e-12));
    }
    const SpeedSolution inf = solve_speed(DispersionCurve(Template{0.0, 1.0, 0.5}, Direction::Rightward, 0.4));
    CHECK(inf.speed == doctest::Approx(-0.4));
}

TEST_CASE("error paths") {
    CHECK_THROWS_AS((void)solve_speed(DispersionCurve(Template{0.2, 0.3, 0.4}, Direction::Rightward)),
                    HypothesisError);
    CHECK_THROWS_AS((void)solve_speed(DispersionCurve(Template{0.0, 2.0, 0.0}, Direction::Rightward)),
                    HypothesisError);
    CHECK_THROWS_AS((void)solve_speed(DispersionCurve(Template{0.5, 1.0, 0.5}, Direction::Rightward), 0.0),
                    DomainError);
    CHECK_THROWS_AS((void)classify_sign(Template{0.2, 0.3, 0.4}, Direction::Rightward), HypothesisError);
    const SpeedReport r = analyze(Template{0.2, 0.3, 0.4});
    CHECK_FALSE(r.hypothesis_h);
    CHECK_FALSE(r.plus.has_value());
    CHECK_THROWS_AS((void)r.c_plus(), HypothesisError);
}

TEST_CASE("sign_of band") {
    CHECK(sign_of(1e-10) == SignClass::Zero);
    CHECK(sign_of(-2e-9) == SignClass::Negative);
    CHECK(sign_of(0.5) == SignClass::Positive);
    CHECK(to_string(SignClass::Negative) == "negative");
}

TEST_CASE("property: c_plus + c_minus > 0") {
    TemplateGen gen(21);
    for (int n = 0; n < 500; ++n) {
        const SpeedReport r = analyze(gen.next_h());
        CHECK(r.c_plus() + r.c_minus() > kZeroSpeedBand);
    }
}

TEST_CASE("property: reflection swaps the two speeds") {
    TemplateGen gen(22);
    for (int n = 0; n < 200; ++n) {
        const Template t = gen.next_h();
        const SpeedReport r = analyze(t);
        const SpeedReport s = analyze(t.swapped());
        CHECK(std::abs(r.c_minus() - s.c_plus()) <= 1e-10);
        CHECK(std::abs(r.c_plus() - s.c_minus()) <= 1e-10);
        if (t.alpha > t.beta) {
            CHECK(r.c_plus() > r.c_minus());
            CHECK(r.c_plus() > 0.0);
        } else if (t.alpha == t.beta) {
            CHECK(r.c_plus() == r.c_minus());
        }
    }
}

TEST_CASE("property: speeds are nondecreasing in every weight") {
    TemplateGen gen(23);
    for (int n = 0; n < 150; ++n) {
        const Template t = gen.next_h();
        const SpeedReport r = analyze(t);
        for (int which = 0; which < 3; ++which) {
            const SpeedReport b = analyze(bump(t, which, gen.uniform(1e-3, 0.3)));
            CHECK(b.c_plus() >= r.c_plus() - 1e-9);
            CHECK(b.c_minus() >= r.c_minus() - 1e-9);
        }
    }
}

TEST_CASE("property: agreement with the dense-grid oracle") {
    TemplateGen gen(24);
    int compared = 0;
    for (int n = 0; n < 120; ++n) {
        const Template t = gen.next_h();
        for (Direction d : {Direction::Rightward, Direction::Leftward}) {
            const SpeedSolution s = solve_speed(DispersionCurve(t, d));
            const auto grid = grid_infimum(t, d);
            CHECK(s.speed <= grid.value + 1e-12);
            if (s.minimizer.interior() && s.minimizer.mu_star > 1e-3 && s.minimizer.mu_star < 50.0) {
                CHECK(std::abs(s.speed - grid.value) <= 1e-4);
                ++compared;
            }
        }
    }
    CHECK(compared >= 100);
}

TEST_CASE("property: interior minimiser is locally optimal") {
    TemplateGen gen(25);
    for (int n = 0; n < 200; ++n) {
        const Template t = gen.next_h();
        const Direction d = n % 2 ? Direction::Leftward : Direction::Rightward;
        const DispersionCurve c(t, d);
        const SpeedSolution s = solve_speed(c);
        if (!s.minimizer.interior()) {
            CHECK(c.g(50.0) < 0.0);
            continue;
        }
        const double mu = s.minimizer.mu_star;
        CHECK(c.phi(mu * (1 + 1e-3)) >= s.speed - 1e-12);
        CHECK(c.phi(mu * (1 - 1e-3)) >= s.speed - 1e-12);
    }
}

TEST_CASE("property: closed-form sign table agrees with the numeric speed") {
    TemplateGen gen(26);
    for (const auto& cell : cnnspeed::testing::sign_cells()) {
        for (int n = 0; n < 20; ++n) {
            const Template t = cell.draw(gen);
            CAPTURE(cell.name);
            CAPTURE(t.alpha);
            CAPTURE(t.a);
            CAPTURE(t.beta);
            CHECK(cnnspeed::testing::check_sign_cell(cell, t) == "");
        }
    }
}

TEST_CASE("property: minimiser matches an independent bisection of g") {
    TemplateGen gen(27);
    for (int n = 0; n < 150; ++n) {
        const Template t = gen.next_h();
        const Direction d = n % 2 ? Direction::Leftward : Direction::Rightward;
        const SpeedSolution s = solve_speed(DispersionCurve(t, d));
        if (!s.minimizer.interior()) continue;
        const double ref = cnnspeed::testing::bisect_g(t, d, 1e-12, 100.0);
        CHECK(s.minimizer.mu_star == doctest::Approx(ref).epsilon(1e-7));
    }
}
