#include "anoma/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "anoma/bisection.hpp"

namespace anoma {

std::string_view to_string(AllocationMethod method) noexcept {
    switch (method) {
        case AllocationMethod::NomaClosedForm: return "noma";
        case AllocationMethod::AnomaLowerZ05: return "anoma_z05";
        case AllocationMethod::AnomaUpperZ1: return "anoma_z1";
        case AllocationMethod::AnomaExact: return "anoma_exact";
    }
    return "unknown";
}

std::optional<AllocationMethod> parse_method(std::string_view name) noexcept {
    for (auto m : {AllocationMethod::NomaClosedForm, AllocationMethod::AnomaLowerZ05,
                   AllocationMethod::AnomaUpperZ1, AllocationMethod::AnomaExact}) {
        if (to_string(m) == name) return m;
    }
    return std::nullopt;
}

namespace {

struct Roles {
    double h_max;
    double h_min;
    User sic_user;
};

Roles roles(ChannelGain h1, ChannelGain h2) {
    if (h1 >= h2) return {h1.value(), h2.value(), User::User1};
    return {h2.value(), h1.value(), User::User2};
}

// g(x) with c = x P H_min^2 Q folded in by the caller.
double denominator(double h_max, double h_min, double power, double shift) {
    const double s = h_max + h_min - shift;
    const double w = s * s + 4.0 * h_min * (power * h_max * h_min + shift);
    return std::sqrt(w) + s;
}

double closed_form_alpha(const Roles& r, const SystemParams& params, double z) {
    if (r.h_min == 0.0) return 0.0;
    const double power = params.total_power();
    const double shift = z * power * r.h_min * r.h_min * params.q_factor();
    const double alpha = 2.0 * r.h_min / denominator(r.h_max, r.h_min, power, shift);
    return std::clamp(alpha, 0.0, 1.0);
}

AllocationResult make_result(const Roles& r, double alpha, AllocationMethod method,
                             const SystemParams& params, std::optional<double> z) {
    const PowerCoefficient a(alpha);
    return {a, r.sic_user, method, rate_strong(ChannelGain(r.h_max), a, params), z};
}

}  // namespace

AllocationResult alpha_noma(ChannelGain h1, ChannelGain h2, const SystemParams& params) {
    const Roles r = roles(h1, h2);
    return make_result(r, closed_form_alpha(r, params, 0.0), AllocationMethod::NomaClosedForm,
                       params, 0.0);
}

AllocationResult alpha_anoma_bound(ChannelGain h1, ChannelGain h2, const SystemParams& params,
                                   double z) {
    if (!(z >= 0.0 && z <= 1.0))
        throw std::invalid_argument("alpha_anoma_bound: z must lie in [0, 1], got " +
                                    std::to_string(z));
    const Roles r = roles(h1, h2);
    const auto method =
        z == 1.0 ? AllocationMethod::AnomaUpperZ1 : AllocationMethod::AnomaLowerZ05;
    return make_result(r, closed_form_alpha(r, params, z), method, params, z);
}

AllocationResult alpha_anoma_exact(ChannelGain h1, ChannelGain h2, const SystemParams& params,
                                   double tol) {
    if (!(tol > 0.0))
        throw std::invalid_argument("alpha_anoma_exact: tolerance must be positive");
    const Roles r = roles(h1, h2);
    if (r.h_min == 0.0)
        return make_result(r, 0.0, AllocationMethod::AnomaExact, params, std::nullopt);

    const ChannelGain strong(r.h_max);
    const ChannelGain weak(r.h_min);
    auto gap = [&](double alpha) {
        const PowerCoefficient a(alpha);
        return rate_strong(strong, a, params) - rate_weak(weak, a, params);
    };
    // gap(0) = -log2(1 + P H_min) < 0 and gap(1) = log2(1 + P H_max) > 0.
    const BisectionResult root = bisect(gap, 0.0, 1.0, tol, tol);
    return make_result(r, root.root, AllocationMethod::AnomaExact, params, std::nullopt);
}

AllocationResult allocate(AllocationMethod method, ChannelGain h1, ChannelGain h2,
                          const SystemParams& params) {
    switch (method) {
        case AllocationMethod::NomaClosedForm: return alpha_noma(h1, h2, params);
        case AllocationMethod::AnomaLowerZ05: return alpha_anoma_bound(h1, h2, params, 0.5);
        case AllocationMethod::AnomaUpperZ1: return alpha_anoma_bound(h1, h2, params, 1.0);
        case AllocationMethod::AnomaExact: return alpha_anoma_exact(h1, h2, params);
    }
    throw std::invalid_argument("allocate: unknown method");
}

double g_denominator(double x, ChannelGain h1, ChannelGain h2, const SystemParams& params) {
    const Roles r = roles(h1, h2);
    const double power = params.total_power();
    return denominator(r.h_max, r.h_min, power,
                       x * power * r.h_min * r.h_min * params.q_factor());
}

double equal_rate_residual(PowerCoefficient alpha, ChannelGain h1, ChannelGain h2,
                           const SystemParams& params) {
    const Roles r = roles(h1, h2);
    const double a = alpha.value();
    const double p = params.total_power();
    const double lhs =
        2.0 * (1.0 + a * p * (r.h_max + r.h_min) + a * a * p * p * r.h_max * r.h_min);
    const double ph = p * r.h_min;
    const double shared = a * (1.0 - a) * ph * ph * params.q_factor();
    const double rhs =
        std::sqrt(weak_rate_radicand(ChannelGain(r.h_min), alpha, params)) + 1.0 + ph + shared;
    return std::fabs(lhs - rhs) / std::fabs(lhs);
}

CoefficientChain check_theorem1(ChannelGain h1, ChannelGain h2, const SystemParams& params,
                                double tol) {
    CoefficientChain c{};
    c.noma = alpha_noma(h1, h2, params).alpha.value();
    c.lower = alpha_anoma_bound(h1, h2, params, 0.5).alpha.value();
    c.exact = alpha_anoma_exact(h1, h2, params).alpha.value();
    c.upper = alpha_anoma_bound(h1, h2, params, 1.0).alpha.value();
    c.holds = c.noma <= c.lower + tol && c.lower <= c.exact + tol && c.exact <= c.upper + tol;
    return c;
}

}  // namespace anoma
