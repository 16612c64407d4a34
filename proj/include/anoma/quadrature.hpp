// Gauss-Legendre rules and the gain-pair integrator behind the full-CSI rate.
#pragma once

#include <functional>
#include <vector>

#include "anoma/distribution.hpp"

namespace anoma {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1], ascending
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule by Newton iteration on P_n. Throws
/// std::invalid_argument for n < 1.
GaussRule gauss_legendre(int n);

struct QuadratureSpec {
    int nodes = 512;                // per axis
    double tail_probability = 1e-10;  // truncation at the 1 - p quantile of each marginal
    double max_error = 1e-6;        // error estimate above this is a failure
};

struct QuadratureResult {
    double value;
    double error_estimate;  // |I(n) - I(n/2)|
};

/// Integrates integrand(h1, h2) f1(h1) f2(h2) over the positive quadrant.
///
/// The quadrant is split along h1 = h2 so that integrands built from
/// max/min of the gains are smooth on each piece. On the piece h2 <= h1 the
/// inner gain is written h2 = s h1 with s in [0, 1], and symmetrically on
/// the other piece. The outer gain runs to the truncation quantile.
QuadratureResult integrate_gain_pair(const ChannelDistribution& d1, const ChannelDistribution& d2,
                                     const std::function<double(double, double)>& integrand,
                                     const QuadratureSpec& spec = {});

}  // namespace anoma
