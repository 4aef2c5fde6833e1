#include "cnnspeed/io.hpp"

#include "cnnspeed/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <system_error>

namespace cnnspeed {

using nlohmann::ordered_json;

std::string format_shortest(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) {
        throw OutOfRangeError("cannot format double");
    }
    return std::string(buf, end);
}

double round_significant(double value, int digits) {
    if (value == 0.0) {
        return 0.0;
    }
    if (!std::isfinite(value)) {
        return value;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, value);
    const double rounded = std::strtod(buf, nullptr);
    // Avoid emitting -0.
    return rounded == 0.0 ? 0.0 : rounded;
}

ordered_json template_to_json(const Template& t) {
    return ordered_json{{"alpha", t.alpha}, {"a", t.a}, {"beta", t.beta}};
}

namespace {

ordered_json mu_to_json(const Minimizer& m) {
    if (!m.interior()) {
        return "infinity";
    }
    return round_significant(m.mu_star, kJsonDigits);
}

std::string csv_mu(const std::optional<SpeedSolution>& s) {
    if (!s) {
        return "nan";
    }
    return s->minimizer.interior() ? format_shortest(s->minimizer.mu_star) : "infinity";
}

std::string csv_speed(const std::optional<SpeedSolution>& s) {
    return s ? format_shortest(s->speed) : "nan";
}

} // namespace

ordered_json speed_report_to_json(const SpeedReport& report) {
    const DirectionalSpeed& plus = report.in(Direction::Rightward);
    const DirectionalSpeed& minus = report.in(Direction::Leftward);
    ordered_json j;
    j["template"] = template_to_json(report.tmpl);
    j["c_plus"] = round_significant(plus.speed, kJsonDigits);
    j["c_minus"] = round_significant(minus.speed, kJsonDigits);
    j["mu_star_plus"] = mu_to_json(plus.minimizer);
    j["mu_star_minus"] = mu_to_json(minus.minimizer);
    j["sign_plus"] = std::string(to_string(plus.sign));
    j["sign_minus"] = std::string(to_string(minus.sign));
    j["hypothesis_h"] = report.hypothesis_h;
    return j;
}

ordered_json error_to_json(std::string_view kind, std::string_view message) {
    return ordered_json{{"error", std::string(kind)}, {"message", std::string(message)}};
}

void write_phi_curve_csv(std::ostream& out, const DispersionCurve& curve, double mu_min, double mu_max,
                         int steps) {
    if (!(mu_min > 0.0 && mu_min < mu_max && std::isfinite(mu_max))) {
        throw DomainError("phi curve needs 0 < mu_min < mu_max");
    }
    if (steps < 2) {
        throw DomainError("phi curve needs at least 2 points");
    }
    out << "mu,phi\n";
    const double span = mu_max - mu_min;
    for (int k = 0; k < steps; ++k) {
        const double mu = k + 1 == steps ? mu_max : mu_min + span * k / (steps - 1);
        out << format_shortest(mu) << ',' << format_shortest(curve.phi(mu)) << '\n';
    }
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
    out << "n_or_s,c_plus,c_minus,mu_star_plus,mu_star_minus,abs_error_plus,abs_error_minus\n";
    for (const ConvergenceRow& r : rows) {
        const bool valid = r.plus && r.minus;
        out << format_shortest(r.n_or_s) << ',' << csv_speed(r.plus) << ',' << csv_speed(r.minus) << ','
            << csv_mu(r.plus) << ',' << csv_mu(r.minus) << ','
            << (valid ? format_shortest(r.abs_error_plus) : "nan") << ','
            << (valid ? format_shortest(r.abs_error_minus) : "nan") << '\n';
    }
}

std::vector<ConvergenceRow> convergence_rows(const ContinuityReport& report) {
    std::vector<ConvergenceRow> rows;
    rows.reserve(report.rows.size());
    for (const ContinuityRow& r : report.rows) {
        rows.push_back({r.label, r.plus, r.minus, r.abs_error_plus, r.abs_error_minus});
    }
    return rows;
}

std::vector<ConvergenceRow> convergence_rows(const LimitPath& plus, const LimitPath& minus) {
    if (plus.points.size() != minus.points.size()) {
        throw DomainError("limit paths have different grids");
    }
    std::vector<ConvergenceRow> rows;
    rows.reserve(plus.points.size());
    for (std::size_t k = 0; k < plus.points.size(); ++k) {
        const LimitPoint& p = plus.points[k];
        const LimitPoint& m = minus.points[k];
        auto as_solution = [](const LimitPoint& pt) {
            const bool finite = std::isfinite(pt.mu_star);
            return SpeedSolution{pt.speed, Minimizer{finite ? Minimizer::Kind::Interior : Minimizer::Kind::AtInfinity,
                                                     pt.mu_star, pt.speed}};
        };
        rows.push_back({p.s, as_solution(p), as_solution(m), std::abs(p.speed - plus.limit_value),
                        std::abs(m.speed - minus.limit_value)});
    }
    return rows;
}

ordered_json manifest_to_json(const RunManifest& manifest) {
    ordered_json j;
    j["command"] = manifest.command;
    j["parameters"] = manifest.parameters;
    j["output_paths"] = manifest.output_paths;
    j["tool_version"] = manifest.tool_version;
    j["wall_time"] = manifest.wall_time;
    return j;
}

} // namespace cnnspeed
