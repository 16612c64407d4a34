#include "anoma/distribution.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace anoma {

ChannelDistribution::ChannelDistribution(double rate) : rate_(rate) {
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw std::invalid_argument("ChannelDistribution: rate must be positive, got " +
                                    std::to_string(rate));
}

double ChannelDistribution::pdf(double x) const noexcept {
    return x < 0.0 ? 0.0 : rate_ * std::exp(-rate_ * x);
}

double ChannelDistribution::cdf(double x) const noexcept {
    return x <= 0.0 ? 0.0 : -std::expm1(-rate_ * x);
}

double ChannelDistribution::survival(double x) const noexcept {
    return x <= 0.0 ? 1.0 : std::exp(-rate_ * x);
}

double ChannelDistribution::quantile(double p) const {
    if (!(p >= 0.0 && p < 1.0))
        throw std::invalid_argument("ChannelDistribution::quantile: p must lie in [0, 1)");
    return -std::log1p(-p) / rate_;
}

}  // namespace anoma
