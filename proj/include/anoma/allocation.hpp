// Max-min power allocation for the two-user downlink.
//
// The BS picks the SIC user and the power split from the (quantized) gains
// it received. The strong user is the one with the larger gain, with ties
// going to User 1. Every allocator returns the coefficient for that user and
// the max-min rate log2(1 + alpha P H_max).
#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "anoma/model.hpp"

namespace anoma {

enum class AllocationMethod {
    NomaClosedForm,  // synchronous closed form
    AnomaLowerZ05,   // ANOMA closed-form bound with z = 0.5 (lower)
    AnomaUpperZ1,    // ANOMA closed-form bound with z = 1 (upper)
    AnomaExact,      // ANOMA equal-rate coefficient by bisection
};

std::string_view to_string(AllocationMethod method) noexcept;

/// Accepts the CLI names noma, anoma_z05, anoma_z1, anoma_exact.
std::optional<AllocationMethod> parse_method(std::string_view name) noexcept;

struct AllocationResult {
    PowerCoefficient alpha;
    User sic_user = User::User1;
    AllocationMethod method = AllocationMethod::NomaClosedForm;
    double maxmin_rate = 0.0;
    /// Interpolation parameter of the closed-form family; 0 for NOMA,
    /// unset for the exact solver.
    std::optional<double> z;
};

/// Default bracket tolerance of the exact solver.
inline constexpr double kExactTolerance = 1e-10;

/// Closed-form NOMA coefficient 2 H_min / (sqrt((H1+H2)^2 + 4 P H1 H2 H_min) + H1 + H2).
/// A zero minimum gain yields alpha = 0 and rate 0.
AllocationResult alpha_noma(ChannelGain h1, ChannelGain h2, const SystemParams& params);

/// Closed-form ANOMA family alpha_A(z) = 2 H_min / g(z). z = 0.5 gives the lower
/// bound and z = 1 the upper bound on the exact coefficient. Throws
/// std::invalid_argument for z outside [0, 1].
AllocationResult alpha_anoma_bound(ChannelGain h1, ChannelGain h2, const SystemParams& params,
                                   double z);

/// Equal-rate ANOMA coefficient found by bisection on
/// rate_strong(H_max, alpha) - rate_weak(H_min, alpha) over [0, 1].
/// Throws ConvergenceError if 200 halvings do not reach tol.
AllocationResult alpha_anoma_exact(ChannelGain h1, ChannelGain h2, const SystemParams& params,
                                   double tol = kExactTolerance);

/// Dispatch on method. AnomaExact uses kExactTolerance.
AllocationResult allocate(AllocationMethod method, ChannelGain h1, ChannelGain h2,
                          const SystemParams& params);

/// Denominator g(x) of the closed-form family. Positive for x in [0, 1] and
/// strictly decreasing in x when Q > 0 and both gains are positive.
double g_denominator(double x, ChannelGain h1, ChannelGain h2, const SystemParams& params);

/// Relative mismatch between the two sides of the equal-rate condition
///   2 [1 + a P (H1 + H2) + a^2 P^2 H1 H2] = sqrt(radicand(H_min)) + A(H_min)
/// at coefficient alpha, with H1 the larger gain.
double equal_rate_residual(PowerCoefficient alpha, ChannelGain h1, ChannelGain h2,
                           const SystemParams& params);

struct CoefficientChain {
    double noma;
    double lower;  // z = 0.5
    double exact;
    double upper;  // z = 1
    bool holds;
};

/// Evaluates noma <= lower <= exact <= upper with absolute slack tol.
CoefficientChain check_theorem1(ChannelGain h1, ChannelGain h2, const SystemParams& params,
                                double tol = 1e-9);

}  // namespace anoma
