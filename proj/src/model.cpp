#include "anoma/model.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace anoma {

SystemParams::SystemParams(double total_power, double tau)
    : total_power_(total_power), tau_(tau), q_factor_(2.0 * tau * (1.0 - tau)) {
    if (!(total_power > 0.0) || !std::isfinite(total_power))
        throw std::invalid_argument("SystemParams: total power must be positive, got " +
                                    std::to_string(total_power));
    if (!(tau >= 0.0 && tau < 1.0))
        throw std::invalid_argument("SystemParams: tau must lie in [0, 1), got " +
                                    std::to_string(tau));
}

ChannelGain::ChannelGain(double value) : value_(value) {
    if (!(value >= 0.0) || !std::isfinite(value))
        throw std::invalid_argument("ChannelGain: gain must be finite and nonnegative, got " +
                                    std::to_string(value));
}

PowerCoefficient::PowerCoefficient(double alpha) : alpha_(alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("PowerCoefficient: alpha must lie in [0, 1], got " +
                                    std::to_string(alpha));
}

double rate_strong(ChannelGain h, PowerCoefficient alpha, const SystemParams& params) {
    return std::log2(1.0 + alpha.value() * params.total_power() * h.value());
}

namespace {

struct WeakTerms {
    double a;  // 1 + PH + alpha(1-alpha) P^2 H^2 Q
    double b;  // alpha(1-alpha) P^2 H^2 Q
};

WeakTerms weak_terms(ChannelGain h, PowerCoefficient alpha, const SystemParams& params) {
    const double ph = params.total_power() * h.value();
    const double a = alpha.value();
    const double b = a * (1.0 - a) * ph * ph * params.q_factor();
    return {1.0 + ph + b, b};
}

}  // namespace

double weak_rate_radicand(ChannelGain h, PowerCoefficient alpha, const SystemParams& params) {
    const auto [a, b] = weak_terms(h, alpha, params);
    return (a - b) * (a + b);
}

double rate_weak(ChannelGain h, PowerCoefficient alpha, const SystemParams& params) {
    const auto [a, b] = weak_terms(h, alpha, params);
    const double radicand = (a - b) * (a + b);
    // (A - B) = 1 + PH > 0 and A + B > 0.
    assert(radicand > 0.0);
    const double ph = params.total_power() * h.value();
    return std::log2((a + std::sqrt(radicand)) / (2.0 * (1.0 + alpha.value() * ph)));
}

RatePair rate_pair(ChannelGain h_strong, ChannelGain h_weak, PowerCoefficient alpha,
                   const SystemParams& params) {
    return {rate_strong(h_strong, alpha, params), rate_weak(h_weak, alpha, params)};
}

}  // namespace anoma
