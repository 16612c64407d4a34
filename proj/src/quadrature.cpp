#include "anoma/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace anoma {

GaussRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) <= 1e-16) break;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[n - 1 - i] = x;
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

namespace {

// Integral over the piece where the `outer` gain is the larger one.
// swap = false: outer is h1; swap = true: outer is h2.
double triangle(const ChannelDistribution& outer_dist, const ChannelDistribution& inner_dist,
                const std::function<double(double, double)>& integrand, bool swap,
                double truncation, const GaussRule& rule) {
    const double half_t = 0.5 * truncation;
    double total = 0.0;
    for (std::size_t a = 0; a < rule.nodes.size(); ++a) {
        const double outer = half_t * (rule.nodes[a] + 1.0);
        double inner_sum = 0.0;
        for (std::size_t b = 0; b < rule.nodes.size(); ++b) {
            const double s = 0.5 * (rule.nodes[b] + 1.0);
            const double inner = s * outer;
            const double value = swap ? integrand(inner, outer) : integrand(outer, inner);
            inner_sum += rule.weights[b] * value * inner_dist.pdf(inner);
        }
        // ds = 0.5 dt, d(inner) = outer ds
        total += rule.weights[a] * outer_dist.pdf(outer) * outer * 0.5 * inner_sum;
    }
    return half_t * total;
}

double integrate_once(const ChannelDistribution& d1, const ChannelDistribution& d2,
                      const std::function<double(double, double)>& integrand, double tail,
                      int nodes) {
    const GaussRule rule = gauss_legendre(nodes);
    // The tie line h1 == h2 belongs to the first piece; it has measure zero.
    return triangle(d1, d2, integrand, false, d1.quantile(1.0 - tail), rule) +
           triangle(d2, d1, integrand, true, d2.quantile(1.0 - tail), rule);
}

}  // namespace

QuadratureResult integrate_gain_pair(const ChannelDistribution& d1, const ChannelDistribution& d2,
                                     const std::function<double(double, double)>& integrand,
                                     const QuadratureSpec& spec) {
    if (spec.nodes < 2) throw std::invalid_argument("integrate_gain_pair: need at least 2 nodes");
    if (!(spec.tail_probability > 0.0 && spec.tail_probability < 1.0))
        throw std::invalid_argument("integrate_gain_pair: tail probability must lie in (0, 1)");
    const double fine = integrate_once(d1, d2, integrand, spec.tail_probability, spec.nodes);
    const double coarse = integrate_once(d1, d2, integrand, spec.tail_probability, spec.nodes / 2);
    return {fine, std::fabs(fine - coarse)};
}

}  // namespace anoma
