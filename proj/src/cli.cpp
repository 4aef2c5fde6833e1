#include "cnnspeed/cli.hpp"

#include "cnnspeed/asymptotics.hpp"
#include "cnnspeed/errors.hpp"
#include "cnnspeed/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace cnnspeed::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

/// Usage-level failure detected after CLI parsing (exit code 1).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- --config expansion -------------------------------------------------

bool flag_given(const std::vector<std::string>& args, const std::string& flag) {
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
        return a == flag || a.rfind(flag + "=", 0) == 0;
    });
}

std::string config_scalar(const json& v) {
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_number_float()) {
        return format_shortest(v.get<double>());
    }
    if (v.is_object() || v.is_array()) {
        throw UsageError("config value " + v.dump() + " is not a scalar");
    }
    return v.dump();
}

void append_config_flags(const json& obj, const std::vector<std::string>& given, std::vector<std::string>& extra) {
    for (const auto& [key, value] : obj.items()) {
        if (value.is_null()) {
            continue;
        }
        std::string name = key;
        std::replace(name.begin(), name.end(), '_', '-');
        const std::string flag = "--" + name;
        if (name == "config" || flag_given(given, flag)) {
            continue;
        }
        extra.push_back(flag);
        if (value.is_array()) {
            for (const json& e : value) extra.push_back(config_scalar(e));
        } else {
            extra.push_back(config_scalar(value));
        }
    }
}

/// Replaces `--config file.json` by the flags it holds. Keys are option names
/// (underscores allowed for dashes); an object keyed by the subcommand name is
/// merged in as well. Flags given explicitly on the command line win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> kept;
    std::vector<std::string> files;
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k] == "--config") {
            if (k + 1 >= args.size()) {
                throw UsageError("--config needs a file name");
            }
            files.push_back(args[++k]);
        } else if (args[k].rfind("--config=", 0) == 0) {
            files.push_back(args[k].substr(9));
        } else {
            kept.push_back(args[k]);
        }
    }
    if (files.empty()) {
        return kept;
    }
    const std::string subcommand = kept.empty() ? std::string{} : kept.front();
    std::vector<std::string> extra;
    for (const std::string& path : files) {
        std::ifstream f(path);
        if (!f) {
            throw UsageError("cannot open config file " + path);
        }
        json j;
        try {
            j = json::parse(f);
        } catch (const json::parse_error& e) {
            throw UsageError("config file " + path + " is not valid JSON: " + e.what());
        }
        if (!j.is_object()) {
            throw UsageError("config file " + path + " must hold a JSON object");
        }
        json flat = json::object();
        for (const auto& [key, value] : j.items()) {
            if (!value.is_object()) {
                flat[key] = value;
            } else if (key != subcommand) {
                throw UsageError("config file " + path + ": section '" + key + "' does not match the subcommand");
            }
        }
        if (j.contains(subcommand) && j.at(subcommand).is_object()) {
            append_config_flags(j.at(subcommand), kept, extra);
            std::vector<std::string> seen = kept;
            seen.insert(seen.end(), extra.begin(), extra.end());
            append_config_flags(flat, seen, extra);
        } else {
            append_config_flags(flat, kept, extra);
        }
    }
    kept.insert(kept.end(), extra.begin(), extra.end());
    return kept;
}

struct TemplateFlags {
    double alpha{0.0};
    double a{0.0};
    double beta{0.0};

    [[nodiscard]] Template make() const { return Template{alpha, a, beta}; }
};

void add_template_flags(CLI::App* sub, TemplateFlags& t) {
    sub->add_option("--alpha", t.alpha, "Rightward coupling weight (left neighbour)")->required();
    sub->add_option("--a", t.a, "Self coupling weight")->required();
    sub->add_option("--beta", t.beta, "Leftward coupling weight (right neighbour)")->required();
}

void add_sim_flags(CLI::App* sub, SimOptions& s) {
    sub->add_option("--dt", s.dt, "RK4 time step")->capture_default_str();
    sub->add_option("--t-end", s.t_end, "Final time")->capture_default_str();
    sub->add_option("--half-width", s.half_width, "Window half-width L (0 = automatic)")->capture_default_str();
    sub->add_option("--init-width", s.init_half_width, "Initial plateau half-width w0");
    sub->add_option("--init-level", s.init_level, "Initial plateau level (default K)");
    sub->add_option("--stride", s.snapshot_stride, "Steps between snapshots")->capture_default_str();
}

void add_config_and_out(CLI::App* sub, std::string& out_dir) {
    // Expanded before parsing; registered so that it shows up in --help.
    sub->add_option("--config", "JSON file supplying option values (command-line flags win)");
    sub->add_option("--out", out_dir, "Directory for file outputs and the run manifest");
}

ordered_json template_params(const TemplateFlags& t) {
    return ordered_json{{"alpha", t.alpha}, {"a", t.a}, {"beta", t.beta}};
}

SimConfig make_config(const Template& tmpl, const SimOptions& o, int init_half_width) {
    SimConfig c;
    c.tmpl = tmpl;
    c.half_width = o.half_width;
    c.dt = o.dt;
    c.t_end = o.t_end;
    c.init_half_width = init_half_width;
    c.init_level = o.init_level;
    c.snapshot_stride = o.snapshot_stride;
    return c;
}

ordered_json sim_params(const SimConfig& c) {
    return ordered_json{{"dt", c.dt},
                        {"t_end", c.t_end},
                        {"half_width", c.resolved_half_width()},
                        {"init_width", c.init_half_width},
                        {"init_level", c.resolved_init_level()},
                        {"stride", c.snapshot_stride}};
}

/// Writes data files plus manifest.json into dir.
void write_outputs(const std::string& dir, const std::vector<std::pair<std::string, std::string>>& files,
                   RunManifest manifest, std::chrono::steady_clock::time_point started) {
    fs::create_directories(dir);
    for (const auto& [name, content] : files) {
        const fs::path path = fs::path(dir) / name;
        std::ofstream f(path, std::ios::binary);
        if (!f) {
            throw UsageError("cannot write " + path.string());
        }
        f << content;
        manifest.output_paths.push_back(path.string());
    }
    manifest.tool_version = std::string(kToolVersion);
    manifest.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::ofstream f(fs::path(dir) / "manifest.json", std::ios::binary);
    if (!f) {
        throw UsageError("cannot write manifest in " + dir);
    }
    f << manifest_to_json(manifest).dump(2) << '\n';
}

// ---- sweep spec parsing -------------------------------------------------

[[noreturn]] void spec_error(const std::string& field, const std::string& what) {
    throw UsageError("sweep spec: " + field + ": " + what);
}

double spec_number(const json& j, const std::string& field) {
    if (!j.is_number()) {
        spec_error(field, "expected a number");
    }
    return j.get<double>();
}

Template spec_template(const json& j, const std::string& field) {
    double w[3];
    if (j.is_array()) {
        if (j.size() != 3) {
            spec_error(field, "expected [alpha, a, beta]");
        }
        for (std::size_t k = 0; k < 3; ++k) w[k] = spec_number(j[k], field + "[" + std::to_string(k) + "]");
    } else if (j.is_object()) {
        const char* names[3] = {"alpha", "a", "beta"};
        for (int k = 0; k < 3; ++k) {
            if (!j.contains(names[k])) {
                spec_error(field + "." + names[k], "missing");
            }
            w[k] = spec_number(j.at(names[k]), field + "." + names[k]);
        }
    } else {
        spec_error(field, "expected a template object or [alpha, a, beta] array");
    }
    try {
        return Template{w[0], w[1], w[2]};
    } catch (const DomainError& e) {
        spec_error(field, e.what());
    }
}

json load_spec(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw UsageError("cannot open sweep spec " + path);
    }
    try {
        json j = json::parse(f);
        if (!j.is_object()) {
            spec_error("<root>", "expected a JSON object");
        }
        return j;
    } catch (const json::parse_error& e) {
        // e.what() carries "at line L, column C".
        throw UsageError("sweep spec " + path + ": " + e.what());
    }
}

double optional_number(const json& spec, const char* key, double fallback) {
    return spec.contains(key) ? spec_number(spec.at(key), key) : fallback;
}

// ---- subcommands --------------------------------------------------------

int cmd_analyze(const TemplateFlags& tf, double tol, const std::string& out_dir, std::ostream& out,
                std::chrono::steady_clock::time_point started) {
    const Template tmpl = tf.make();
    if (!tmpl.satisfies_h()) {
        ordered_json e = error_to_json("hypothesis",
                                       "template violates (H): need alpha+beta > 0 and alpha+a+beta > 1");
        e["template"] = template_to_json(tmpl);
        e["hypothesis_h"] = false;
        out << e.dump(2) << '\n';
        return kHypothesis;
    }
    const std::string payload = speed_report_to_json(analyze(tmpl, tol)).dump(2) + "\n";
    out << payload;
    if (!out_dir.empty()) {
        RunManifest m;
        m.command = "analyze";
        m.parameters = template_params(tf);
        m.parameters["tol"] = tol;
        write_outputs(out_dir, {{"report.json", payload}}, m, started);
    }
    return kOk;
}

int cmd_phi_curve(const TemplateFlags& tf, const std::string& direction, double mu_min, double mu_max, int steps,
                  const std::string& out_dir, std::ostream& out, std::chrono::steady_clock::time_point started) {
    const DispersionCurve curve(tf.make(), parse_direction(direction));
    std::ostringstream csv;
    write_phi_curve_csv(csv, curve, mu_min, mu_max, steps);
    if (out_dir.empty()) {
        out << csv.str();
        return kOk;
    }
    RunManifest m;
    m.command = "phi-curve";
    m.parameters = template_params(tf);
    m.parameters["direction"] = std::string(to_string(curve.direction()));
    m.parameters["mu_min"] = mu_min;
    m.parameters["mu_max"] = mu_max;
    m.parameters["steps"] = steps;
    write_outputs(out_dir, {{"phi_curve.csv", csv.str()}}, m, started);
    return kOk;
}

int cmd_simulate(const TemplateFlags& tf, const SimOptions& so, const std::string& out_dir,
                 std::chrono::steady_clock::time_point started) {
    if (out_dir.empty()) {
        throw UsageError("simulate writes snapshot files and needs --out <dir>");
    }
    const SimConfig config = make_config(tf.make(), so, so.init_half_width.value_or(kDefaultPlateau));
    const auto snapshots = simulate(config);
    std::ostringstream csv;
    write_snapshots_csv(csv, snapshots);
    RunManifest m;
    m.command = "simulate";
    m.parameters = template_params(tf);
    m.parameters.update(sim_params(config));
    write_outputs(out_dir, {{"snapshots.csv", csv.str()}}, m, started);
    return kOk;
}

int cmd_estimate(const TemplateFlags& tf, const SimOptions& so, const std::string& out_dir, std::ostream& out,
                 std::chrono::steady_clock::time_point started) {
    const Comparison cmp = compare_with_simulation(tf.make(), so);
    ordered_json j;
    j["c_plus_sim"] = round_significant(cmp.plus.fitted_speed, kJsonDigits);
    j["c_minus_sim"] = round_significant(cmp.minus.fitted_speed, kJsonDigits);
    j["c_plus_formula"] = round_significant(cmp.report.c_plus(), kJsonDigits);
    j["c_minus_formula"] = round_significant(cmp.report.c_minus(), kJsonDigits);
    j["abs_gap_plus"] = round_significant(cmp.abs_gap_plus(), kJsonDigits);
    j["abs_gap_minus"] = round_significant(cmp.abs_gap_minus(), kJsonDigits);
    const std::string payload = j.dump(2) + "\n";
    out << payload;
    if (!out_dir.empty()) {
        std::ostringstream plus_csv;
        std::ostringstream minus_csv;
        write_front_trace_csv(plus_csv, cmp.plus);
        write_front_trace_csv(minus_csv, cmp.minus);
        RunManifest m;
        m.command = "estimate";
        m.parameters = template_params(tf);
        m.parameters.update(sim_params(cmp.config));
        m.parameters["threshold"] = cmp.threshold;
        m.parameters["fit_fraction"] = so.fit_fraction;
        write_outputs(out_dir,
                      {{"estimate.json", payload}, {"front_plus.csv", plus_csv.str()},
                       {"front_minus.csv", minus_csv.str()}},
                      m, started);
    }
    return kOk;
}

int cmd_sweep(const std::string& mode, const std::string& spec_path, const std::string& out_dir, std::ostream& out,
              std::ostream& err, std::chrono::steady_clock::time_point started) {
    const json spec = load_spec(spec_path);
    if (spec.contains("mode") && (!spec.at("mode").is_string() || spec.at("mode").get<std::string>() != mode)) {
        spec_error("mode", "does not match --mode " + mode);
    }

    const std::vector<std::string> known =
        mode == "sequence" ? std::vector<std::string>{"mode", "limit", "entries", "labels", "tolerance", "entry_tolerance"}
                           : std::vector<std::string>{"mode", "base", "rates", "s_values", "tolerance", "s0"};
    for (const auto& [key, value] : spec.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            spec_error(key, "unknown field for --mode " + mode);
        }
    }

    std::vector<ConvergenceRow> rows;
    double tolerance = 0.0;
    if (mode == "sequence") {
        if (!spec.contains("limit")) spec_error("limit", "missing");
        if (!spec.contains("entries") || !spec.at("entries").is_array() || spec.at("entries").empty()) {
            spec_error("entries", "expected a nonempty array of templates");
        }
        const Template limit = spec_template(spec.at("limit"), "limit");
        std::vector<Template> entries;
        for (std::size_t k = 0; k < spec.at("entries").size(); ++k) {
            entries.push_back(spec_template(spec.at("entries")[k], "entries[" + std::to_string(k) + "]"));
        }
        std::vector<double> labels;
        if (spec.contains("labels")) {
            const json& l = spec.at("labels");
            if (!l.is_array() || l.size() != entries.size()) {
                spec_error("labels", "expected one label per entry");
            }
            for (std::size_t k = 0; k < l.size(); ++k) {
                labels.push_back(spec_number(l[k], "labels[" + std::to_string(k) + "]"));
            }
        }
        tolerance = optional_number(spec, "tolerance", 1e-3);
        const double entry_tol = optional_number(spec, "entry_tolerance", 1e-2);
        std::optional<TemplateSequence> seq;
        try {
            seq.emplace(std::move(entries), limit, std::move(labels), entry_tol);
        } catch (const DomainError& e) {
            spec_error("entries", e.what());
        }
        const ContinuityReport report = verify_speed_continuity(*seq, tolerance);
        if (!report.sandwich_holds) {
            err << "warning: envelope sandwich bound violated\n";
        }
        rows = convergence_rows(report);
    } else {
        if (!spec.contains("base")) spec_error("base", "missing");
        const Template base = spec_template(spec.at("base"), "base");
        Template rates{0.0, 0.0, 1.0};
        if (spec.contains("rates")) rates = spec_template(spec.at("rates"), "rates");
        std::vector<double> s_values;
        if (spec.contains("s_values")) {
            const json& s = spec.at("s_values");
            if (!s.is_array() || s.empty()) spec_error("s_values", "expected a nonempty array");
            for (std::size_t k = 0; k < s.size(); ++k) {
                s_values.push_back(spec_number(s[k], "s_values[" + std::to_string(k) + "]"));
            }
        } else {
            s_values = geometric_s_grid(5);
        }
        tolerance = optional_number(spec, "tolerance", 0.05);
        const double s0 = optional_number(spec, "s0", 1.0);
        std::optional<ParametrizedTemplate> path;
        try {
            path.emplace(
                [base, rates](double s) {
                    return Template{base.alpha + rates.alpha * s, base.a + rates.a * s, base.beta + rates.beta * s};
                },
                s0);
        } catch (const HypothesisError& e) {
            spec_error("base", e.what());
        } catch (const DomainError& e) {
            spec_error("s0", e.what());
        }
        LimitPath plus;
        LimitPath minus;
        try {
            plus = limiting_speed_path(*path, s_values, Direction::Rightward);
            minus = limiting_speed_path(*path, s_values, Direction::Leftward);
        } catch (const DomainError& e) {
            spec_error("s_values", e.what());
        }
        rows = convergence_rows(plus, minus);
    }

    std::ostringstream csv;
    write_convergence_csv(csv, rows);
    out << csv.str();
    if (!out_dir.empty()) {
        RunManifest m;
        m.command = "sweep";
        m.parameters = ordered_json{{"mode", mode}, {"spec", spec_path}, {"tolerance", tolerance}};
        write_outputs(out_dir, {{"convergence.csv", csv.str()}}, m, started);
    }
    const ConvergenceRow& last = rows.back();
    const bool met = last.plus && last.minus && last.abs_error_plus <= tolerance && last.abs_error_minus <= tolerance;
    return met ? kOk : kToleranceNotMet;
}

} // namespace

double Comparison::abs_gap_plus() const { return std::abs(plus.fitted_speed - report.c_plus()); }
double Comparison::abs_gap_minus() const { return std::abs(minus.fitted_speed - report.c_minus()); }

Comparison compare_with_simulation(const Template& tmpl, const SimOptions& options) {
    Comparison cmp;
    cmp.report = analyze(tmpl);
    if (!cmp.report.hypothesis_h) {
        throw HypothesisError("template violates (H); no spreading speeds to compare");
    }
    cmp.config = make_config(tmpl, options, options.init_half_width.value_or(default_plateau(cmp.report)));
    const double k = tmpl.equilibrium();
    cmp.threshold = options.threshold.value_or(0.5 * k);
    const auto snapshots = simulate(cmp.config);
    cmp.plus = estimate_speed(snapshots, Direction::Rightward, cmp.threshold, options.fit_fraction, k);
    cmp.minus = estimate_speed(snapshots, Direction::Leftward, cmp.threshold, options.fit_fraction, k);
    return cmp;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const auto started = std::chrono::steady_clock::now();

    CLI::App app{"Spreading speeds of the 1-D cellular neural network lattice"};
    app.name("cnnspeed");
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    std::string out_dir;
    TemplateFlags tf;
    SimOptions so;

    auto* analyze_cmd = app.add_subcommand("analyze", "Both spreading speeds and sign classes as JSON");
    double tol = kDefaultRootTolerance;
    add_template_flags(analyze_cmd, tf);
    analyze_cmd->add_option("--tol", tol, "Root tolerance on |g|")->capture_default_str();
    add_config_and_out(analyze_cmd, out_dir);

    auto* phi_cmd = app.add_subcommand("phi-curve", "Phi(mu) on a uniform grid as CSV");
    std::string direction = "right";
    double mu_min = 0.1;
    double mu_max = 5.0;
    int steps = 100;
    add_template_flags(phi_cmd, tf);
    phi_cmd->add_option("--direction", direction, "right or left")->capture_default_str();
    phi_cmd->add_option("--mu-min", mu_min)->capture_default_str();
    phi_cmd->add_option("--mu-max", mu_max)->capture_default_str();
    phi_cmd->add_option("--steps", steps)->capture_default_str();
    add_config_and_out(phi_cmd, out_dir);

    auto* sim_cmd = app.add_subcommand("simulate", "Integrate the lattice and write snapshots");
    add_template_flags(sim_cmd, tf);
    add_sim_flags(sim_cmd, so);
    add_config_and_out(sim_cmd, out_dir);

    auto* est_cmd = app.add_subcommand("estimate", "Simulated versus formula speeds");
    add_template_flags(est_cmd, tf);
    add_sim_flags(est_cmd, so);
    est_cmd->add_option("--threshold", so.threshold, "Front level (default K/2)");
    est_cmd->add_option("--fit-fraction", so.fit_fraction, "Trailing fraction of time used in the fit")
        ->capture_default_str();
    add_config_and_out(est_cmd, out_dir);

    auto* sweep_cmd = app.add_subcommand("sweep", "Continuity or limiting-case convergence table");
    std::string mode;
    std::string spec_path;
    sweep_cmd->add_option("--mode", mode, "sequence or limit")
        ->required()
        ->check(CLI::IsMember({"sequence", "limit"}));
    sweep_cmd->add_option("--spec", spec_path, "JSON sweep specification")->required();
    add_config_and_out(sweep_cmd, out_dir);

    std::vector<std::string> expanded;
    try {
        expanded = expand_config(args);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    try {
        std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (analyze_cmd->parsed()) return cmd_analyze(tf, tol, out_dir, out, started);
        if (phi_cmd->parsed()) return cmd_phi_curve(tf, direction, mu_min, mu_max, steps, out_dir, out, started);
        if (sim_cmd->parsed()) return cmd_simulate(tf, so, out_dir, started);
        if (est_cmd->parsed()) return cmd_estimate(tf, so, out_dir, out, started);
        if (sweep_cmd->parsed()) return cmd_sweep(mode, spec_path, out_dir, out, err, started);
    } catch (const HypothesisError& e) {
        out << error_to_json("hypothesis", e.what()).dump(2) << '\n';
        return kHypothesis;
    } catch (const InsufficientDataError& e) {
        out << error_to_json("estimation", e.what()).dump(2) << '\n';
        return kEstimation;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const cnnspeed::ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const cnnspeed::Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

} // namespace cnnspeed::cli
