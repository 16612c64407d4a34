#include "anoma/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "anoma/csv.hpp"
#include "anoma/evaluation.hpp"
#include "anoma/monte_carlo.hpp"

namespace anoma {

std::string_view to_string(Scenario s) noexcept {
    switch (s) {
        case Scenario::BitsSweep: return "sweep";
        case Scenario::OptimizerRun: return "optimize";
        case Scenario::CodebookDump: return "dump-codebook";
        case Scenario::TheoremCheck: return "check-theorem";
        case Scenario::MonteCarloValidate: return "validate";
    }
    return "unknown";
}

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
    text = trim(text);
    T value{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw std::invalid_argument("config: invalid value '" + std::string(text) + "' for " +
                                    std::string(key));
    return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
    text = trim(text);
    if (text == "true" || text == "1" || text == "on" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "off" || text == "no") return false;
    throw std::invalid_argument("config: invalid boolean '" + std::string(text) + "' for " +
                                std::string(key));
}

std::vector<std::string_view> split_list(std::string_view text) {
    std::vector<std::string_view> parts;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto item = trim(text.substr(0, comma));
        if (!item.empty()) parts.push_back(item);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return parts;
}

std::optional<Scenario> parse_scenario(std::string_view name) {
    for (auto s : {Scenario::BitsSweep, Scenario::OptimizerRun, Scenario::CodebookDump,
                   Scenario::TheoremCheck, Scenario::MonteCarloValidate})
        if (to_string(s) == name) return s;
    return std::nullopt;
}

SystemParams system_params(const ExperimentConfig& c) { return {c.power, c.tau}; }

QuadratureSpec quadrature(const ExperimentConfig& c) {
    QuadratureSpec spec;
    spec.nodes = c.quad_nodes;
    return spec;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write output file " + path.string());
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw std::runtime_error("failed writing output file " + path.string());
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
    auto out = open_output(path);
    writer(out);
    finish(out, path);
}

}  // namespace

void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key == "scenario") {
        const auto s = parse_scenario(value);
        if (!s) throw std::invalid_argument("config: unknown scenario '" + std::string(value) + "'");
        c.scenario = *s;
    } else if (key == "power") {
        c.power = parse_number<double>(key, value);
    } else if (key == "tau") {
        c.tau = parse_number<double>(key, value);
    } else if (key == "lambda1") {
        c.lambda1 = parse_number<double>(key, value);
    } else if (key == "lambda2") {
        c.lambda2 = parse_number<double>(key, value);
    } else if (key == "bits") {
        c.bits = parse_number<int>(key, value);
    } else if (key == "bits_min") {
        c.bits_min = parse_number<int>(key, value);
    } else if (key == "bits_max") {
        c.bits_max = parse_number<int>(key, value);
    } else if (key == "variants") {
        c.variants.clear();
        for (auto name : split_list(value)) {
            const auto m = parse_method(name);
            if (!m) throw std::invalid_argument("config: unknown variant '" + std::string(name) + "'");
            c.variants.push_back(*m);
        }
    } else if (key == "taus") {
        c.taus.clear();
        for (auto t : split_list(value)) c.taus.push_back(parse_number<double>(key, t));
    } else if (key == "step_size") {
        c.step_size = parse_number<double>(key, value);
    } else if (key == "max_iterations") {
        c.max_iterations = parse_number<int>(key, value);
    } else if (key == "backtracking") {
        c.backtracking = parse_bool(key, value);
    } else if (key == "gradient_mode") {
        if (value == "analytic") c.gradient_mode = GradientMode::Analytic;
        else if (value == "finite_difference") c.gradient_mode = GradientMode::FiniteDifference;
        else throw std::invalid_argument("config: unknown gradient_mode '" + std::string(value) + "'");
    } else if (key == "log_base") {
        if (value == "natural") c.log_base = LogBase::Natural;
        else if (value == "binary") c.log_base = LogBase::Binary;
        else throw std::invalid_argument("config: unknown log_base '" + std::string(value) + "'");
    } else if (key == "seed") {
        c.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "samples") {
        c.samples = parse_number<std::uint64_t>(key, value);
    } else if (key == "theorem_samples") {
        c.theorem_samples = parse_number<std::uint64_t>(key, value);
    } else if (key == "quad_nodes") {
        c.quad_nodes = parse_number<int>(key, value);
    } else if (key == "output") {
        c.output = std::string(value);
    } else {
        throw std::invalid_argument("config: unknown key '" + std::string(key) + "'");
    }
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos)
            view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        apply_setting(base, view.substr(0, eq), view.substr(eq + 1));
    }
    return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file " + path.string());
    return parse_config(in, std::move(base));
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
    auto join = [](const auto& items, auto fmt) {
        std::string s;
        for (const auto& it : items) {
            if (!s.empty()) s += ',';
            s += fmt(it);
        }
        return s;
    };
    out << "scenario = " << to_string(c.scenario) << '\n'
        << "power = " << format_number(c.power) << '\n'
        << "tau = " << format_number(c.tau) << '\n'
        << "lambda1 = " << format_number(c.lambda1) << '\n'
        << "lambda2 = " << format_number(c.lambda2) << '\n'
        << "bits = " << c.bits << '\n'
        << "bits_min = " << c.bits_min << '\n'
        << "bits_max = " << c.bits_max << '\n'
        << "variants = "
        << join(c.variants, [](AllocationMethod m) { return std::string(to_string(m)); }) << '\n'
        << "taus = " << join(c.taus, [](double t) { return format_number(t); }) << '\n'
        << "step_size = " << format_number(c.step_size) << '\n'
        << "max_iterations = " << c.max_iterations << '\n'
        << "backtracking = " << (c.backtracking ? "true" : "false") << '\n'
        << "gradient_mode = "
        << (c.gradient_mode == GradientMode::Analytic ? "analytic" : "finite_difference") << '\n'
        << "log_base = " << (c.log_base == LogBase::Natural ? "natural" : "binary") << '\n'
        << "seed = " << c.seed << '\n'
        << "samples = " << c.samples << '\n'
        << "theorem_samples = " << c.theorem_samples << '\n'
        << "quad_nodes = " << c.quad_nodes << '\n'
        << "output = " << c.output.string() << '\n';
}

void validate_config(const ExperimentConfig& c) {
    (void)system_params(c);  // power and tau domains
    if (!(c.lambda1 > 0.0) || !(c.lambda2 > 0.0))
        throw std::invalid_argument("config: lambda1 and lambda2 must be positive");
    if (c.bits < 0 || c.bits > 24) throw std::invalid_argument("config: bits must lie in [0, 24]");
    if (c.bits_min < 0 || c.bits_max > 24 || c.bits_min > c.bits_max)
        throw std::invalid_argument("config: need 0 <= bits_min <= bits_max <= 24");
    if (c.variants.empty()) throw std::invalid_argument("config: variants must not be empty");
    for (double t : c.taus)
        if (!(t >= 0.0 && t < 1.0)) throw std::invalid_argument("config: taus must lie in [0, 1)");
    if (!(c.step_size > 0.0)) throw std::invalid_argument("config: step_size must be positive");
    if (c.max_iterations < 0)
        throw std::invalid_argument("config: max_iterations must be nonnegative");
    if (c.samples < 2) throw std::invalid_argument("config: samples must be at least 2");
    if (c.quad_nodes < 4) throw std::invalid_argument("config: quad_nodes must be at least 4");
}

std::vector<SweepRow> run_bits_sweep(const ExperimentConfig& c) {
    const SystemParams params = system_params(c);
    const ChannelDistribution d1(c.lambda1), d2(c.lambda2);
    std::vector<SweepRow> rows;
    for (auto variant : c.variants) {
        const double bound = full_csi_rate(d1, d2, params, variant, quadrature(c));
        for (int b = c.bits_min; b <= c.bits_max; ++b) {
            const auto cb1 = uniform_codebook(c.lambda1, b, c.log_base);
            const auto cb2 = uniform_codebook(c.lambda2, b, c.log_base);
            rows.push_back(
                {b, variant, expected_rate(cb1, cb2, d1, d2, params, variant).expected_maxmin,
                 bound});
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    CsvWriter csv(out);
    csv.row("bits", "variant", "expected_rate", "full_csi");
    for (const auto& r : rows) csv.row(r.bits, to_string(r.variant), r.expected_rate, r.full_csi);
}

std::vector<OptimizerRun> run_optimizer_experiment(const ExperimentConfig& c) {
    const SystemParams params = system_params(c);
    const ChannelDistribution d1(c.lambda1), d2(c.lambda2);
    const auto cb1 = uniform_codebook(c.lambda1, c.bits, c.log_base);
    const auto cb2 = uniform_codebook(c.lambda2, c.bits, c.log_base);
    std::vector<OptimizerRun> runs;
    for (auto variant : c.variants) {
        OptimizerConfig oc;
        oc.step_size = c.step_size;
        oc.max_iterations = c.max_iterations;
        oc.variant = variant;
        oc.gradient_mode = c.gradient_mode;
        oc.backtracking = c.backtracking;
        runs.push_back({variant, expected_rate(cb1, cb2, d1, d2, params, variant).expected_maxmin,
                        full_csi_rate(d1, d2, params, variant, quadrature(c)),
                        optimize(cb1, cb2, d1, d2, params, oc)});
    }
    return runs;
}

void write_optimizer_csv(std::ostream& out, const std::vector<OptimizerRun>& runs) {
    CsvWriter csv(out);
    csv.row("iteration", "variant", "expected_rate");
    for (const auto& run : runs)
        for (const auto& e : run.result.trace.entries)
            csv.row(e.iteration, to_string(run.variant), e.objective);
}

CodebookDump run_codebook_dump(const ExperimentConfig& c) {
    const SystemParams params = system_params(c);
    const ChannelDistribution d1(c.lambda1), d2(c.lambda2);
    CodebookDump dump{uniform_codebook(c.lambda1, c.bits, c.log_base),
                      uniform_codebook(c.lambda2, c.bits, c.log_base),
                      {}};
    for (auto variant : c.variants)
        dump.reports.push_back(evaluate(dump.cb1, dump.cb2, d1, d2, params, variant, quadrature(c)));
    return dump;
}

std::vector<TheoremRow> run_theorem_check(const ExperimentConfig& c) {
    const ChannelDistribution d1(c.lambda1), d2(c.lambda2);
    std::vector<TheoremRow> rows;
    for (double tau : c.taus) {
        const SystemParams params(c.power, tau);
        std::mt19937_64 rng(c.seed);
        TheoremRow row{tau, 0, 0, 0.0, 0.0, 0.0, 0.0};
        for (std::uint64_t s = 0; s < c.theorem_samples; ++s) {
            const ChannelGain h1(sample_gain(rng, d1));
            const ChannelGain h2(sample_gain(rng, d2));
            if (h1.value() == 0.0 || h2.value() == 0.0) continue;
            const auto chain = check_theorem1(h1, h2, params);
            ++row.samples;
            if (!chain.holds) ++row.violations;
            row.max_spread = std::max({row.max_spread, std::fabs(chain.lower - chain.noma),
                                       std::fabs(chain.exact - chain.noma),
                                       std::fabs(chain.upper - chain.noma)});
            row.max_residual = std::max(
                row.max_residual,
                equal_rate_residual(PowerCoefficient(chain.exact), h1, h2, params));
            row.mean_lower_gap += chain.exact - chain.lower;
            row.mean_upper_gap += chain.upper - chain.exact;
        }
        if (row.samples > 0) {
            row.mean_lower_gap /= static_cast<double>(row.samples);
            row.mean_upper_gap /= static_cast<double>(row.samples);
        }
        rows.push_back(row);
    }
    return rows;
}

void write_theorem_csv(std::ostream& out, const std::vector<TheoremRow>& rows) {
    CsvWriter csv(out);
    csv.row("tau", "samples", "violations", "max_spread", "max_residual", "mean_lower_gap",
            "mean_upper_gap");
    for (const auto& r : rows)
        csv.row(r.tau, r.samples, r.violations, r.max_spread, r.max_residual, r.mean_lower_gap,
                r.mean_upper_gap);
}

bool ValidationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::string ValidationReport::failures() const {
    std::string names;
    for (const auto& c : checks) {
        if (c.passed) continue;
        if (!names.empty()) names += ',';
        names += c.name;
    }
    return names;
}

ValidationReport run_validation(const ExperimentConfig& c) {
    const SystemParams params = system_params(c);
    const ChannelDistribution d1(c.lambda1), d2(c.lambda2);
    const auto cb1 = uniform_codebook(c.lambda1, c.bits, c.log_base);
    const auto cb2 = uniform_codebook(c.lambda2, c.bits, c.log_base);
    MonteCarloSpec mc;
    mc.n_samples = c.samples;
    mc.seed = c.seed;

    ValidationReport report;
    for (auto variant : c.variants) {
        const std::string name(to_string(variant));
        const double closed = expected_rate(cb1, cb2, d1, d2, params, variant).expected_maxmin;
        const auto sim = monte_carlo(cb1, cb2, d1, d2, params, variant, mc);
        const double delta = std::fabs(closed - sim.estimate);
        std::ostringstream detail;
        detail << "closed=" << format_number(closed) << " mc=" << format_number(sim.estimate)
               << " se=" << format_number(sim.standard_error);
        report.checks.push_back({"mc_vs_closed_form_" + name, delta <= 3.0 * sim.standard_error,
                                 detail.str(),
                                 {{"closed_form", closed},
                                  {"monte_carlo", sim.estimate},
                                  {"standard_error", sim.standard_error},
                                  {"delta_in_se", delta / sim.standard_error}}});
        const double mismatch =
            static_cast<double>(sim.order_mismatch_count) / static_cast<double>(sim.n_samples);
        report.checks.push_back({"outage_free_" + name, sim.outage_count == 0,
                                 "outages=" + std::to_string(sim.outage_count),
                                 {{"outage_count", static_cast<double>(sim.outage_count)},
                                  {"order_mismatch_frequency", mismatch}}});
    }

    ExperimentConfig at_tau = c;
    at_tau.taus = {c.tau};
    const TheoremRow row = run_theorem_check(at_tau).front();
    report.checks.push_back({"coefficient_chain", row.violations == 0,
                             "violations=" + std::to_string(row.violations) + " of " +
                                 std::to_string(row.samples),
                             {{"violations", static_cast<double>(row.violations)},
                              {"max_residual", row.max_residual}}});
    report.checks.push_back({"exact_residual", row.max_residual <= 1e-6,
                             "max relative residual " + format_number(row.max_residual),
                             {{"max_residual", row.max_residual}}});
    if (c.tau == 0.0) {
        report.checks.push_back({"variants_agree_at_tau0", row.max_spread <= 1e-9,
                                 "max spread " + format_number(row.max_spread),
                                 {{"max_spread", row.max_spread}}});
    }
    return report;
}

void write_validation_json(std::ostream& out, const ValidationReport& report,
                           const ExperimentConfig& config) {
    nlohmann::ordered_json j;
    j["passed"] = report.passed();
    j["seed"] = config.seed;
    j["samples"] = config.samples;
    j["generator"] = std::string(kGeneratorName);
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : report.checks) {
        nlohmann::ordered_json entry;
        entry["name"] = c.name;
        entry["passed"] = c.passed;
        entry["detail"] = c.detail;
        for (const auto& [k, v] : c.values) entry["values"][k] = v;
        j["checks"].push_back(entry);
    }
    out << j.dump(2) << '\n';
}

namespace {

constexpr std::string_view kSweepPlot = R"PY(import csv
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("sweep.csv")))
for variant in dict.fromkeys(r["variant"] for r in rows):
    sel = [r for r in rows if r["variant"] == variant]
    line, = plt.plot([int(r["bits"]) for r in sel], [float(r["expected_rate"]) for r in sel],
                     marker="o", label=variant)
    plt.axhline(float(sel[0]["full_csi"]), color=line.get_color(), linestyle="--")
plt.xlabel("feedback bits per user")
plt.ylabel("average max-min rate (bits/channel use)")
plt.legend()
plt.savefig("sweep.png", dpi=150)
)PY";

constexpr std::string_view kOptimizerPlot = R"PY(import csv
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("optimize.csv")))
for variant in dict.fromkeys(r["variant"] for r in rows):
    sel = [r for r in rows if r["variant"] == variant]
    plt.plot([int(r["iteration"]) for r in sel], [float(r["expected_rate"]) for r in sel],
             label=variant)
plt.xlabel("iteration")
plt.ylabel("average max-min rate (bits/channel use)")
plt.legend()
plt.savefig("optimize.png", dpi=150)
)PY";

constexpr std::string_view kCodebookPlot = R"PY(import glob
import matplotlib.pyplot as plt

for path in sorted(glob.glob("codebook_*.txt")):
    levels = [float(x) for x in open(path) if x.strip()]
    plt.plot(range(len(levels)), levels, marker="o", label=path[len("codebook_"):-4])
plt.xlabel("level index")
plt.ylabel("channel gain")
plt.legend()
plt.savefig("codebooks.png", dpi=150)
)PY";

}  // namespace

int execute(const ExperimentConfig& c, std::ostream& log) {
    validate_config(c);
    std::error_code ec;
    std::filesystem::create_directories(c.output, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory " + c.output.string() + ": " +
                                 ec.message());
    write_file(c.output / "config.resolved.txt", [&](std::ostream& o) { write_config(o, c); });

    switch (c.scenario) {
        case Scenario::BitsSweep: {
            const auto rows = run_bits_sweep(c);
            write_file(c.output / "sweep.csv", [&](std::ostream& o) { write_sweep_csv(o, rows); });
            write_file(c.output / "plot_sweep.py", [&](std::ostream& o) { o << kSweepPlot; });
            log << "wrote " << rows.size() << " rows to " << (c.output / "sweep.csv").string()
                << '\n';
            return 0;
        }
        case Scenario::OptimizerRun: {
            const auto runs = run_optimizer_experiment(c);
            write_file(c.output / "optimize.csv",
                       [&](std::ostream& o) { write_optimizer_csv(o, runs); });
            for (const auto& run : runs) {
                const std::string v(to_string(run.variant));
                write_file(c.output / ("trace_" + v + ".csv"),
                           [&](std::ostream& o) { write_trace_csv(o, run.result.trace); });
                write_codebook(c.output / ("codebook_" + v + "_user1.txt"), run.result.cb1);
                write_codebook(c.output / ("codebook_" + v + "_user2.txt"), run.result.cb2);
                log << v << ": uniform " << format_number(run.uniform_rate) << " -> optimized "
                    << format_number(run.result.trace.entries.back().objective) << " (full CSI "
                    << format_number(run.full_csi) << ", "
                    << run.result.trace.entries.size() - 1 << " iterations)\n";
            }
            write_file(c.output / "plot_optimize.py", [&](std::ostream& o) { o << kOptimizerPlot; });
            write_file(c.output / "plot_codebooks.py", [&](std::ostream& o) { o << kCodebookPlot; });
            return 0;
        }
        case Scenario::CodebookDump: {
            const auto dump = run_codebook_dump(c);
            write_codebook(c.output / "codebook_uniform_user1.txt", dump.cb1);
            write_codebook(c.output / "codebook_uniform_user2.txt", dump.cb2);
            write_file(c.output / "summary.csv", [&](std::ostream& o) {
                CsvWriter csv(o);
                csv.row("variant", "expected_rate", "full_csi", "distortion");
                for (const auto& r : dump.reports)
                    csv.row(to_string(r.method), r.expected_maxmin, *r.full_csi, distortion(r));
            });
            for (const auto& r : dump.reports) {
                const std::string v(to_string(r.method));
                write_file(c.output / ("report_" + v + ".csv"),
                           [&](std::ostream& o) { write_report_csv(o, r); });
                log << v << ": E[R*] " << format_number(r.expected_maxmin) << ", full CSI "
                    << format_number(*r.full_csi) << ", distortion "
                    << format_number(distortion(r)) << '\n';
            }
            write_file(c.output / "plot_codebooks.py", [&](std::ostream& o) { o << kCodebookPlot; });
            return 0;
        }
        case Scenario::TheoremCheck: {
            const auto rows = run_theorem_check(c);
            write_file(c.output / "theorem_check.csv",
                       [&](std::ostream& o) { write_theorem_csv(o, rows); });
            std::uint64_t violations = 0;
            for (const auto& r : rows) {
                violations += r.violations;
                log << "tau=" << format_number(r.tau) << ": " << r.violations << " violations in "
                    << r.samples << " samples, max residual " << format_number(r.max_residual)
                    << '\n';
            }
            if (violations != 0) {
                log << "FAILED: coefficient_chain\n";
                return 1;
            }
            return 0;
        }
        case Scenario::MonteCarloValidate: {
            const auto report = run_validation(c);
            write_file(c.output / "validation.json",
                       [&](std::ostream& o) { write_validation_json(o, report, c); });
            write_validation_json(log, report, c);
            if (!report.passed()) {
                log << "FAILED: " << report.failures() << '\n';
                return 1;
            }
            return 0;
        }
    }
    return 2;
}

}  // namespace anoma
