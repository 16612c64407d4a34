// Exponential law of a Rayleigh-faded channel gain.
#pragma once

namespace anoma {

/// Exp(lambda) in the rate parametrization: density lambda e^{-lambda x}, mean 1/lambda.
class ChannelDistribution {
public:
    /// Throws std::invalid_argument unless rate > 0.
    explicit ChannelDistribution(double rate);

    double rate() const noexcept { return rate_; }
    double mean() const noexcept { return 1.0 / rate_; }

    double pdf(double x) const noexcept;
    double cdf(double x) const noexcept;
    /// P(H >= x); 0 at +infinity.
    double survival(double x) const noexcept;
    /// Inverse CDF for p in [0, 1).
    double quantile(double p) const;

private:
    double rate_;
};

}  // namespace anoma
