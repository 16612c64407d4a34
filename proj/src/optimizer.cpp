#include "anoma/optimizer.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>

#include "anoma/csv.hpp"

namespace anoma {

namespace {

// Bracket tolerance used when the exact coefficient is differentiated
// numerically; bisection then runs until the bracket collapses.
constexpr double kTightExactTolerance = 1e-15;

double fd_step(double h) { return 1e-6 * std::max(1.0, h); }

double closed_form_z(AllocationMethod method) {
    switch (method) {
        case AllocationMethod::AnomaLowerZ05: return 0.5;
        case AllocationMethod::AnomaUpperZ1: return 1.0;
        default: return 0.0;
    }
}

double rate_for(AllocationMethod method, double h1, double h2, const SystemParams& params,
                bool tight) {
    if (method == AllocationMethod::AnomaExact && tight)
        return alpha_anoma_exact(ChannelGain(h1), ChannelGain(h2), params, kTightExactTolerance)
            .maxmin_rate;
    return allocate(method, ChannelGain(h1), ChannelGain(h2), params).maxmin_rate;
}

double central_difference(const auto& f, double x) {
    const double h = fd_step(x);
    if (x - h < 0.0) return (f(x + h) - f(x)) / h;
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Partials of log2(1 + alpha P a) with alpha = 2m / g, where a = H_max and
// m = H_min, g = sqrt(W) + S, S = a + m - c m^2, W = S^2 + 4 P a m^2 + 4 c m^3
// and c = z P Q.
RatePartials closed_form_partials(double z, double h1, double h2, const SystemParams& params) {
    const bool user1_strong = h1 >= h2;
    const double a = user1_strong ? h1 : h2;
    const double m = user1_strong ? h2 : h1;
    if (a == 0.0) return {0.0, 0.0, 0.0};

    const double p = params.total_power();
    const double c = z * p * params.q_factor();
    const double s = a + m - c * m * m;
    const double w = s * s + 4.0 * p * a * m * m + 4.0 * c * m * m * m;
    const double root_w = std::sqrt(w);
    const double g = root_w + s;
    const double alpha = 2.0 * m / g;

    const double dg_da = (2.0 * s + 4.0 * p * m * m) / (2.0 * root_w) + 1.0;
    const double ds_dm = 1.0 - 2.0 * c * m;
    const double dw_dm = 2.0 * s * ds_dm + 8.0 * p * a * m + 12.0 * c * m * m;
    const double dg_dm = dw_dm / (2.0 * root_w) + ds_dm;
    const double dalpha_da = -2.0 * m * dg_da / (g * g);
    const double dalpha_dm = (2.0 * g - 2.0 * m * dg_dm) / (g * g);

    const double scale = p / ((1.0 + alpha * p * a) * std::numbers::ln2);
    const double rate = alpha_anoma_bound(ChannelGain(h1), ChannelGain(h2), params, z).maxmin_rate;
    const double dr_da = scale * (alpha + a * dalpha_da);
    const double dr_dm = scale * a * dalpha_dm;
    // R* has a kink on h1 == h2; split the diagonal derivative evenly there,
    // which is also what a central difference sees.
    if (h1 == h2) return {rate, 0.5 * (dr_da + dr_dm), 0.5 * (dr_da + dr_dm)};
    return user1_strong ? RatePartials{rate, dr_da, dr_dm} : RatePartials{rate, dr_dm, dr_da};
}

double objective_from_levels(std::span<const double> l1, std::span<const double> l2,
                             const ChannelDistribution& d1, const ChannelDistribution& d2,
                             const SystemParams& params, AllocationMethod method, bool tight) {
    auto mass = [](std::span<const double> l, const ChannelDistribution& d, std::size_t i) {
        return i + 1 < l.size() ? d.survival(l[i]) - d.survival(l[i + 1]) : d.survival(l[i]);
    };
    double total = 0.0;
    for (std::size_t i = 0; i < l1.size(); ++i) {
        const double m1 = mass(l1, d1, i);
        for (std::size_t j = 0; j < l2.size(); ++j)
            total += rate_for(method, l1[i], l2[j], params, tight) * m1 * mass(l2, d2, j);
    }
    return total;
}

void check_own_index(std::size_t index, std::size_t size, const char* what) {
    if (index < 1 || index >= size)
        throw std::out_of_range(std::string(what) + ": level index " + std::to_string(index) +
                                " must lie in [1, " + std::to_string(size - 1) + "]");
}

void check_bin(std::size_t index, std::size_t size, const char* what) {
    if (index >= size)
        throw std::out_of_range(std::string(what) + ": bin index " + std::to_string(index) +
                                " out of range");
}

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

std::vector<double> to_vector(const QuantizerCodebook& cb) {
    return {cb.levels().begin(), cb.levels().end()};
}

}  // namespace

RatePartials maxmin_rate_partials(AllocationMethod method, double h1, double h2,
                                  const SystemParams& params) {
    if (method != AllocationMethod::AnomaExact)
        return closed_form_partials(closed_form_z(method), h1, h2, params);

    const double rate = rate_for(method, h1, h2, params, false);
    const double d1 = central_difference(
        [&](double x) { return rate_for(method, x, h2, params, true); }, h1);
    const double d2 = central_difference(
        [&](double x) { return rate_for(method, h1, x, params, true); }, h2);
    return {rate, d1, d2};
}

double gradient_level_own(User user, std::size_t i, std::size_t j, const QuantizerCodebook& cb1,
                          const QuantizerCodebook& cb2, const ChannelDistribution& d1,
                          const ChannelDistribution& d2, const SystemParams& params,
                          AllocationMethod variant) {
    const bool first = user == User::User1;
    check_own_index(first ? i : j, first ? cb1.size() : cb2.size(), "gradient_level_own");
    check_bin(first ? j : i, first ? cb2.size() : cb1.size(), "gradient_level_own");

    const auto r = maxmin_rate_partials(variant, cb1[i], cb2[j], params);
    if (first)
        return (r.d_h1 * bin_mass(cb1, d1, i) - r.rate * d1.pdf(cb1[i])) * bin_mass(cb2, d2, j);
    return (r.d_h2 * bin_mass(cb2, d2, j) - r.rate * d2.pdf(cb2[j])) * bin_mass(cb1, d1, i);
}

double gradient_level_right(User user, std::size_t i, std::size_t j,
                            const QuantizerCodebook& cb1, const QuantizerCodebook& cb2,
                            const ChannelDistribution& d1, const ChannelDistribution& d2,
                            const SystemParams& params, AllocationMethod variant) {
    const bool first = user == User::User1;
    const std::size_t own = first ? i : j;
    const std::size_t own_size = first ? cb1.size() : cb2.size();
    if (own + 1 >= own_size)
        throw std::out_of_range("gradient_level_right: level index " + std::to_string(own + 1) +
                                " is the unbounded top edge or beyond");
    check_bin(first ? j : i, first ? cb2.size() : cb1.size(), "gradient_level_right");

    const double rate = allocate(variant, ChannelGain(cb1[i]), ChannelGain(cb2[j]), params)
                            .maxmin_rate;
    if (first) return rate * d1.pdf(cb1[i + 1]) * bin_mass(cb2, d2, j);
    return rate * d2.pdf(cb2[j + 1]) * bin_mass(cb1, d1, i);
}

ObjectiveGradient objective_gradient(const QuantizerCodebook& cb1, const QuantizerCodebook& cb2,
                                     const ChannelDistribution& d1,
                                     const ChannelDistribution& d2, const SystemParams& params,
                                     AllocationMethod variant, GradientMode mode) {
    const std::size_t n1 = cb1.size();
    const std::size_t n2 = cb2.size();
    ObjectiveGradient out{0.0, std::vector<double>(n1, 0.0), std::vector<double>(n2, 0.0)};

    if (mode == GradientMode::FiniteDifference) {
        const bool tight = variant == AllocationMethod::AnomaExact;
        std::vector<double> l1 = to_vector(cb1);
        std::vector<double> l2 = to_vector(cb2);
        out.objective = objective_from_levels(l1, l2, d1, d2, params, variant, false);
        auto differentiate = [&](std::vector<double>& levels, std::vector<double>& grad) {
            for (std::size_t k = 1; k < levels.size(); ++k) {
                const double saved = levels[k];
                grad[k] = central_difference(
                    [&](double x) {
                        levels[k] = x;
                        const double v = objective_from_levels(l1, l2, d1, d2, params, variant, tight);
                        levels[k] = saved;
                        return v;
                    },
                    saved);
            }
        };
        differentiate(l1, out.grad1);
        differentiate(l2, out.grad2);
        return out;
    }

    std::vector<double> mass1(n1), mass2(n2);
    for (std::size_t i = 0; i < n1; ++i) mass1[i] = bin_mass(cb1, d1, i);
    for (std::size_t j = 0; j < n2; ++j) mass2[j] = bin_mass(cb2, d2, j);

    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            const auto r = maxmin_rate_partials(variant, cb1[i], cb2[j], params);
            out.objective += r.rate * mass1[i] * mass2[j];
            if (i >= 1)
                out.grad1[i] += (r.d_h1 * mass1[i] - r.rate * d1.pdf(cb1[i])) * mass2[j];
            if (i + 1 < n1) out.grad1[i + 1] += r.rate * d1.pdf(cb1[i + 1]) * mass2[j];
            if (j >= 1)
                out.grad2[j] += (r.d_h2 * mass2[j] - r.rate * d2.pdf(cb2[j])) * mass1[i];
            if (j + 1 < n2) out.grad2[j + 1] += r.rate * d2.pdf(cb2[j + 1]) * mass1[i];
        }
    }
    return out;
}

namespace {

std::vector<double> ascend(const std::vector<double>& levels, const std::vector<double>& grad,
                           double step, double min_gap) {
    std::vector<double> next(levels.size());
    next[0] = 0.0;
    for (std::size_t k = 1; k < levels.size(); ++k) {
        next[k] = levels[k] + step * grad[k];
        if (!(next[k] > next[k - 1])) next[k] = next[k - 1] + min_gap;
    }
    return next;
}

}  // namespace

OptimizerResult optimize(const QuantizerCodebook& cb1_init, const QuantizerCodebook& cb2_init,
                         const ChannelDistribution& d1, const ChannelDistribution& d2,
                         const SystemParams& params, const OptimizerConfig& config) {
    if (!(config.step_size > 0.0))
        throw std::invalid_argument("optimize: step size must be positive");
    if (config.max_iterations < 0)
        throw std::invalid_argument("optimize: max_iterations must be nonnegative");
    if (config.max_halvings < 0)
        throw std::invalid_argument("optimize: max_halvings must be nonnegative");

    QuantizerCodebook cb1 = cb1_init;
    QuantizerCodebook cb2 = cb2_init;
    auto current = objective_gradient(cb1, cb2, d1, d2, params, config.variant,
                                      config.gradient_mode);

    OptimizerTrace trace;
    trace.entries.push_back({0, current.objective, to_vector(cb1), to_vector(cb2),
                             norm(current.grad1), norm(current.grad2), 0.0});

    for (int it = 1; it <= config.max_iterations; ++it) {
        const auto l1 = to_vector(cb1);
        const auto l2 = to_vector(cb2);
        double step = config.step_size;
        const int attempts = config.backtracking ? config.max_halvings + 1 : 1;
        bool accepted = false;
        std::vector<double> next1, next2;
        double next_objective = 0.0;
        for (int a = 0; a < attempts; ++a, step *= 0.5) {
            next1 = ascend(l1, current.grad1, step, config.min_gap);
            next2 = ascend(l2, current.grad2, step, config.min_gap);
            next_objective = objective_from_levels(next1, next2, d1, d2, params, config.variant,
                                                   false);
            if (!config.backtracking || next_objective >= current.objective) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;  // no ascent step left at this resolution

        const double improvement = next_objective - current.objective;
        cb1 = QuantizerCodebook(std::move(next1));
        cb2 = QuantizerCodebook(std::move(next2));
        current = objective_gradient(cb1, cb2, d1, d2, params, config.variant,
                                     config.gradient_mode);
        current.objective = next_objective;
        trace.entries.push_back({it, current.objective, to_vector(cb1), to_vector(cb2),
                                 norm(current.grad1), norm(current.grad2), step});
        if (std::fabs(improvement) < config.tolerance) break;
    }
    return {std::move(cb1), std::move(cb2), std::move(trace)};
}

void write_trace_csv(std::ostream& out, const OptimizerTrace& trace) {
    if (trace.entries.empty()) return;
    const auto& first = trace.entries.front();
    out << "iteration,objective,grad_norm1,grad_norm2,step";
    for (std::size_t k = 0; k < first.levels1.size(); ++k) out << ",q1_" << k;
    for (std::size_t k = 0; k < first.levels2.size(); ++k) out << ",q2_" << k;
    out << '\n';
    for (const auto& e : trace.entries) {
        out << e.iteration << ',' << format_number(e.objective) << ','
            << format_number(e.grad_norm1) << ',' << format_number(e.grad_norm2) << ','
            << format_number(e.step);
        for (double q : e.levels1) out << ',' << format_number(q);
        for (double q : e.levels2) out << ',' << format_number(q);
        out << '\n';
    }
}

}  // namespace anoma
