// Configuration-driven experiment scenarios: bits sweep, optimizer runs,
// codebook dumps, coefficient-ordering checks and end-to-end validation.
//
// Every scenario writes its CSV outputs, a matplotlib script and the
// resolved configuration (config.resolved.txt, same key = value format as
// the input) into the output directory.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "anoma/allocation.hpp"
#include "anoma/evaluation.hpp"
#include "anoma/optimizer.hpp"
#include "anoma/quantizer.hpp"

namespace anoma {

enum class Scenario { BitsSweep, OptimizerRun, CodebookDump, TheoremCheck, MonteCarloValidate };

std::string_view to_string(Scenario s) noexcept;

struct ExperimentConfig {
    Scenario scenario = Scenario::BitsSweep;
    double power = 10.0;
    double tau = 0.5;
    double lambda1 = 0.5;
    double lambda2 = 1.0;
    int bits = 3;
    int bits_min = 1;
    int bits_max = 8;
    std::vector<AllocationMethod> variants = {
        AllocationMethod::NomaClosedForm, AllocationMethod::AnomaLowerZ05,
        AllocationMethod::AnomaUpperZ1, AllocationMethod::AnomaExact};
    std::vector<double> taus = {0.0, 0.1, 0.3, 0.5, 0.9};
    double step_size = 0.05;
    int max_iterations = 500;
    bool backtracking = true;
    GradientMode gradient_mode = GradientMode::Analytic;
    LogBase log_base = LogBase::Natural;
    std::uint64_t seed = 20190101;
    std::uint64_t samples = 1'000'000;
    std::uint64_t theorem_samples = 10'000;
    int quad_nodes = 512;
    std::filesystem::path output = "out";
};

/// Sets one field from its textual key and value. Throws std::invalid_argument
/// for unknown keys or unparsable values.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Reads "key = value" lines ('#' starts a comment) on top of base.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Writes every field in the format parse_config reads.
void write_config(std::ostream& out, const ExperimentConfig& config);

/// Throws std::invalid_argument if a field violates its domain.
void validate_config(const ExperimentConfig& config);

struct SweepRow {
    int bits;
    AllocationMethod variant;
    double expected_rate;
    double full_csi;
};

/// Uniform codebooks for each bit count and variant; rows ordered by
/// (variant in config order, bits).
std::vector<SweepRow> run_bits_sweep(const ExperimentConfig& config);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct OptimizerRun {
    AllocationMethod variant;
    double uniform_rate;
    double full_csi;
    OptimizerResult result;
};

/// Optimizes from uniform codebooks with config.bits bits for each variant
/// in config.variants.
std::vector<OptimizerRun> run_optimizer_experiment(const ExperimentConfig& config);
/// CSV: iteration,variant,expected_rate
void write_optimizer_csv(std::ostream& out, const std::vector<OptimizerRun>& runs);

struct TheoremRow {
    double tau;
    std::uint64_t samples;
    std::uint64_t violations;
    /// Largest |alpha_variant - alpha_noma| over the samples; 0 within noise at tau = 0.
    double max_spread;
    /// Largest relative residual of the equal-rate equation at the exact coefficient.
    double max_residual;
    double mean_lower_gap;  // mean of exact - lower
    double mean_upper_gap;  // mean of upper - exact
};

/// Draws config.theorem_samples gain pairs from Exp(lambda1) x Exp(lambda2)
/// per tau in config.taus.
std::vector<TheoremRow> run_theorem_check(const ExperimentConfig& config);
void write_theorem_csv(std::ostream& out, const std::vector<TheoremRow>& rows);

struct ValidationCheck {
    std::string name;
    bool passed;
    std::string detail;
    std::vector<std::pair<std::string, double>> values;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool passed() const;
    /// Names of failing checks, comma separated.
    std::string failures() const;
};

/// Closed form vs Monte Carlo (3 standard errors), zero outages and the
/// coefficient chain, for config.bits-bit uniform codebooks.
ValidationReport run_validation(const ExperimentConfig& config);
void write_validation_json(std::ostream& out, const ValidationReport& report,
                           const ExperimentConfig& config);

struct CodebookDump {
    QuantizerCodebook cb1;
    QuantizerCodebook cb2;
    std::vector<RateReport> reports;  // one per variant, with full-CSI rate
};

/// Uniform codebooks with config.bits bits and their rate reports.
CodebookDump run_codebook_dump(const ExperimentConfig& config);

/// Scenario runners that also write files into config.output. Throw
/// std::runtime_error naming the path when an output cannot be written.
/// Return the process exit code.
int execute(const ExperimentConfig& config, std::ostream& log);

}  // namespace anoma
