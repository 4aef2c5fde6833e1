#pragma once

#include "cnnspeed/asymptotics.hpp"
#include "cnnspeed/dispersion.hpp"
#include "cnnspeed/speed_solver.hpp"

#include <json.hpp>

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace cnnspeed {

/// Shortest decimal string that round-trips to the same double
/// ("inf", "-inf", "nan" for non-finite values).
[[nodiscard]] std::string format_shortest(double value);

/// value rounded to `digits` significant decimal digits.
[[nodiscard]] double round_significant(double value, int digits = 6);

/// JSON speeds carry 6 significant digits.
inline constexpr int kJsonDigits = 6;

[[nodiscard]] nlohmann::ordered_json template_to_json(const Template& t);

/// Fields: template{alpha,a,beta}, c_plus, c_minus, mu_star_plus,
/// mu_star_minus (number or "infinity"), sign_plus, sign_minus, hypothesis_h.
/// Throws HypothesisError if the report has no speeds.
[[nodiscard]] nlohmann::ordered_json speed_report_to_json(const SpeedReport& report);

/// Machine-readable error object {"error": kind, "message": ..., ...}.
[[nodiscard]] nlohmann::ordered_json error_to_json(std::string_view kind, std::string_view message);

/// CSV "mu,phi" on a uniform grid of `steps` points spanning [mu_min, mu_max].
/// DomainError unless 0 < mu_min < mu_max and steps >= 2.
void write_phi_curve_csv(std::ostream& out, const DispersionCurve& curve, double mu_min, double mu_max,
                         int steps);

/// Convergence table row; non-finite speeds print as "nan", an at-infinity
/// minimiser as "infinity".
struct ConvergenceRow {
    double n_or_s{0.0};
    std::optional<SpeedSolution> plus;
    std::optional<SpeedSolution> minus;
    double abs_error_plus{0.0};
    double abs_error_minus{0.0};
};

/// CSV with columns n_or_s,c_plus,c_minus,mu_star_plus,mu_star_minus,abs_error_plus,abs_error_minus.
void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows);

[[nodiscard]] std::vector<ConvergenceRow> convergence_rows(const ContinuityReport& report);
[[nodiscard]] std::vector<ConvergenceRow> convergence_rows(const LimitPath& plus, const LimitPath& minus);

/// Record written next to every set of file outputs.
struct RunManifest {
    std::string command;
    nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
    std::vector<std::string> output_paths;
    std::string tool_version;
    double wall_time{0.0};
};

[[nodiscard]] nlohmann::ordered_json manifest_to_json(const RunManifest& manifest);

} // namespace cnnspeed
