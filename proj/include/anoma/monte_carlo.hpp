// Seeded Monte Carlo harness for the limited-feedback downlink.
//
// Each sample draws (H1, H2), quantizes both gains, lets the BS allocate from
// the quantized values and records the assigned max-min rate. The
// transmission rate of each user is compared against its rate formula at the
// true gain to count outages.
//
// Samples are processed in fixed-size blocks. Block k draws from an
// mt19937_64 seeded with splitmix64(seed ^ splitmix64(k)), and block sums are
// reduced in block order, so the result depends on (seed, n_samples,
// block_size) only and not on the number of workers.
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "anoma/allocation.hpp"
#include "anoma/distribution.hpp"
#include "anoma/quantizer.hpp"

namespace anoma {

inline constexpr std::string_view kGeneratorName = "mt19937_64/splitmix64-block-seeded";

struct MonteCarloSpec {
    std::uint64_t n_samples = 1'000'000;
    std::uint64_t seed = 20190101;
    std::uint64_t block_size = 1u << 16;
    unsigned workers = 0;  // 0 = hardware concurrency
};

struct MonteCarloResult {
    double estimate = 0.0;
    double standard_error = 0.0;
    std::uint64_t outage_count = 0;
    /// Samples where the quantized SIC order differs from the true one.
    std::uint64_t order_mismatch_count = 0;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
};

/// Inverse-CDF exponential draw using the top 53 bits of one generator output.
double sample_gain(std::mt19937_64& rng, const ChannelDistribution& dist);

/// Throws std::invalid_argument if n_samples or block_size is zero.
MonteCarloResult monte_carlo(const QuantizerCodebook& cb1, const QuantizerCodebook& cb2,
                             const ChannelDistribution& d1, const ChannelDistribution& d2,
                             const SystemParams& params, AllocationMethod method,
                             const MonteCarloSpec& spec = {});

/// Unquantized-gain Monte Carlo of the full-CSI max-min rate; same seeding scheme.
MonteCarloResult monte_carlo_full_csi(const ChannelDistribution& d1,
                                      const ChannelDistribution& d2, const SystemParams& params,
                                      AllocationMethod method, const MonteCarloSpec& spec = {});

}  // namespace anoma
