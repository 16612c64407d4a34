#include "anoma/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

namespace anoma {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Uniform on [0, 1) from the top 53 bits; independent of the library's
// distribution implementations.
double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct BlockSums {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::uint64_t outages = 0;
    std::uint64_t mismatches = 0;
};

// Rates are evaluated in floating point; a transmission rate counts as an
// outage only if it exceeds the capacity by more than rounding noise.
bool exceeds(double transmitted, double capacity) {
    return transmitted > capacity + 1e-12 * std::max(1.0, std::fabs(capacity));
}

template <class Sample>
MonteCarloResult run_blocks(const MonteCarloSpec& spec, Sample&& sample) {
    if (spec.n_samples == 0) throw std::invalid_argument("monte_carlo: n_samples must be >= 1");
    if (spec.block_size == 0) throw std::invalid_argument("monte_carlo: block_size must be >= 1");

    const std::uint64_t n_blocks = (spec.n_samples + spec.block_size - 1) / spec.block_size;
    std::vector<BlockSums> blocks(n_blocks);
    std::atomic<std::uint64_t> next{0};

    auto worker = [&] {
        for (std::uint64_t k = next.fetch_add(1); k < n_blocks; k = next.fetch_add(1)) {
            std::mt19937_64 rng(splitmix64(spec.seed ^ splitmix64(k)));
            const std::uint64_t begin = k * spec.block_size;
            const std::uint64_t end = std::min(spec.n_samples, begin + spec.block_size);
            BlockSums& b = blocks[k];
            for (std::uint64_t s = begin; s < end; ++s) sample(rng, b);
        }
    };

    unsigned workers = spec.workers ? spec.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, n_blocks));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }

    BlockSums total;
    for (const auto& b : blocks) {
        total.sum += b.sum;
        total.sum_sq += b.sum_sq;
        total.outages += b.outages;
        total.mismatches += b.mismatches;
    }
    const double n = static_cast<double>(spec.n_samples);
    MonteCarloResult r;
    r.estimate = total.sum / n;
    if (spec.n_samples > 1) {
        const double var = std::max(0.0, (total.sum_sq - n * r.estimate * r.estimate) / (n - 1.0));
        r.standard_error = std::sqrt(var / n);
    }
    r.outage_count = total.outages;
    r.order_mismatch_count = total.mismatches;
    r.n_samples = spec.n_samples;
    r.seed = spec.seed;
    return r;
}

}  // namespace

double sample_gain(std::mt19937_64& rng, const ChannelDistribution& dist) {
    return -std::log1p(-unit_uniform(rng)) / dist.rate();
}

MonteCarloResult monte_carlo(const QuantizerCodebook& cb1, const QuantizerCodebook& cb2,
                             const ChannelDistribution& d1, const ChannelDistribution& d2,
                             const SystemParams& params, AllocationMethod method,
                             const MonteCarloSpec& spec) {
    return run_blocks(spec, [&](std::mt19937_64& rng, BlockSums& b) {
        const double h1 = sample_gain(rng, d1);
        const double h2 = sample_gain(rng, d2);
        const ChannelGain fed_back1(quantize(cb1, h1));
        const ChannelGain fed_back2(quantize(cb2, h2));
        const auto alloc = allocate(method, fed_back1, fed_back2, params);

        const bool user1_sic = alloc.sic_user == User::User1;
        const ChannelGain true_strong(user1_sic ? h1 : h2);
        const ChannelGain true_weak(user1_sic ? h2 : h1);
        const ChannelGain quant_strong = user1_sic ? fed_back1 : fed_back2;
        const ChannelGain quant_weak = user1_sic ? fed_back2 : fed_back1;

        if (exceeds(rate_strong(quant_strong, alloc.alpha, params),
                    rate_strong(true_strong, alloc.alpha, params)) ||
            exceeds(rate_weak(quant_weak, alloc.alpha, params),
                    rate_weak(true_weak, alloc.alpha, params)))
            ++b.outages;
        if (user1_sic != (h1 >= h2)) ++b.mismatches;

        b.sum += alloc.maxmin_rate;
        b.sum_sq += alloc.maxmin_rate * alloc.maxmin_rate;
    });
}

MonteCarloResult monte_carlo_full_csi(const ChannelDistribution& d1,
                                      const ChannelDistribution& d2, const SystemParams& params,
                                      AllocationMethod method, const MonteCarloSpec& spec) {
    return run_blocks(spec, [&](std::mt19937_64& rng, BlockSums& b) {
        const double h1 = sample_gain(rng, d1);
        const double h2 = sample_gain(rng, d2);
        const double rate = allocate(method, ChannelGain(h1), ChannelGain(h2), params).maxmin_rate;
        b.sum += rate;
        b.sum_sq += rate * rate;
    });
}

}  // namespace anoma
