// Gradient ascent on the quantization levels of both users.
//
// The objective is the exact expected max-min rate
//   E = sum_{i,j} R*(q_i1, q_j2) M1_i M2_j,   M_i = S(q_i) - S(q_{i+1}),
// with S the survival function of the gain. Each cell depends on q_i1,
// q_{i+1}1, q_j2 and q_{j+1}2; level 0 stays pinned at zero and the
// implicit +inf edge of the top bin receives no gradient.
#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "anoma/allocation.hpp"
#include "anoma/distribution.hpp"
#include "anoma/quantizer.hpp"

namespace anoma {

enum class GradientMode { Analytic, FiniteDifference };

struct OptimizerConfig {
    double step_size = 0.05;
    int max_iterations = 500;
    AllocationMethod variant = AllocationMethod::NomaClosedForm;
    GradientMode gradient_mode = GradientMode::Analytic;
    /// Halve the step until the objective does not decrease. Off reproduces
    /// the raw fixed-step update.
    bool backtracking = true;
    int max_halvings = 30;
    /// Stop once a sweep improves the objective by less than this.
    double tolerance = 1e-10;
    /// Minimum gap enforced between consecutive levels after an update.
    double min_gap = 1e-9;
};

struct RatePartials {
    double rate;
    double d_h1;
    double d_h2;
};

/// R*(h1, h2) and its partial derivatives. Closed-form methods are
/// differentiated analytically; on the tie h1 == h2, where R* has a kink,
/// both partials are the mean of the two one-sided values. The exact method
/// uses central differences with step 1e-6 max(1, h).
RatePartials maxmin_rate_partials(AllocationMethod method, double h1, double h2,
                                  const SystemParams& params);

/// d E_ij / d q_{i,1} for user = User1 (1 <= i <= N1-1), or d E_ij / d q_{j,2}
/// for user = User2 (1 <= j <= N2-1):
///   [dR*/dq_own * M_own - R* f_own(q_own)] * M_other.
/// Throws std::out_of_range when the own index is outside that range.
double gradient_level_own(User user, std::size_t i, std::size_t j, const QuantizerCodebook& cb1,
                          const QuantizerCodebook& cb2, const ChannelDistribution& d1,
                          const ChannelDistribution& d2, const SystemParams& params,
                          AllocationMethod variant);

/// d E_ij / d q_{i+1,1} (user = User1) or d E_ij / d q_{j+1,2} (user = User2):
///   R* f_own(q_{own+1}) M_other, always >= 0.
/// The own index + 1 must be a finite level, i.e. own index <= N - 2.
double gradient_level_right(User user, std::size_t i, std::size_t j,
                            const QuantizerCodebook& cb1, const QuantizerCodebook& cb2,
                            const ChannelDistribution& d1, const ChannelDistribution& d2,
                            const SystemParams& params, AllocationMethod variant);

struct ObjectiveGradient {
    double objective;
    std::vector<double> grad1;  // entry 0 is always 0
    std::vector<double> grad2;
};

/// Objective and gradient w.r.t. every level. Analytic mode accumulates the
/// per-cell terms above over all (i, j); FiniteDifference differentiates the
/// assembled objective numerically.
ObjectiveGradient objective_gradient(const QuantizerCodebook& cb1, const QuantizerCodebook& cb2,
                                     const ChannelDistribution& d1,
                                     const ChannelDistribution& d2, const SystemParams& params,
                                     AllocationMethod variant,
                                     GradientMode mode = GradientMode::Analytic);

struct TraceEntry {
    int iteration;
    double objective;
    std::vector<double> levels1;
    std::vector<double> levels2;
    double grad_norm1;
    double grad_norm2;
    double step;  // accepted step; 0 for the initial entry
};

struct OptimizerTrace {
    std::vector<TraceEntry> entries;
};

struct OptimizerResult {
    QuantizerCodebook cb1;
    QuantizerCodebook cb2;
    OptimizerTrace trace;
};

/// Throws std::invalid_argument for step_size <= 0 or max_iterations < 0.
OptimizerResult optimize(const QuantizerCodebook& cb1_init, const QuantizerCodebook& cb2_init,
                         const ChannelDistribution& d1, const ChannelDistribution& d2,
                         const SystemParams& params, const OptimizerConfig& config);

/// CSV: iteration,objective,grad_norm1,grad_norm2,step,q1_0..,q2_0..
void write_trace_csv(std::ostream& out, const OptimizerTrace& trace);

}  // namespace anoma
