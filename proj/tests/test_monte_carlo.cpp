#include <cmath>

#include <doctest.h>

#include "anoma/evaluation.hpp"
#include "anoma/monte_carlo.hpp"

using namespace anoma;

namespace {

const SystemParams kParams(10.0, 0.5);
const ChannelDistribution kD1(0.5), kD2(1.0);

MonteCarloSpec spec_with(std::uint64_t n, std::uint64_t seed, unsigned workers = 1,
                         std::uint64_t block = 1u << 14) {
    MonteCarloSpec s;
    s.n_samples = n;
    s.seed = seed;
    s.workers = workers;
    s.block_size = block;
    return s;
}

}  // namespace

TEST_CASE("single-level codebooks give zero rate and no outage") {
    const auto r = monte_carlo(QuantizerCodebook::zero(), QuantizerCodebook::zero(), kD1, kD2,
                               kParams, AllocationMethod::AnomaExact, spec_with(10000, 1));
    CHECK(r.estimate == 0.0);
    CHECK(r.standard_error == 0.0);
    CHECK(r.outage_count == 0);
}

TEST_CASE("Monte Carlo agrees with the closed-form expectation") {
    const auto cb1 = uniform_codebook(0.5, 3);
    const auto cb2 = uniform_codebook(1.0, 3);
    for (auto m : {AllocationMethod::NomaClosedForm, AllocationMethod::AnomaLowerZ05,
                   AllocationMethod::AnomaUpperZ1, AllocationMethod::AnomaExact}) {
        const double closed = expected_rate(cb1, cb2, kD1, kD2, kParams, m).expected_maxmin;
        const auto mc = monte_carlo(cb1, cb2, kD1, kD2, kParams, m, spec_with(200000, 99));
        CHECK(std::fabs(mc.estimate - closed) <= 3.0 * mc.standard_error);
        CHECK(mc.outage_count == 0);
        CHECK(mc.order_mismatch_count > 0);
        CHECK(mc.order_mismatch_count < mc.n_samples / 2);
    }
}

TEST_CASE("no outage for random codebooks at several timing offsets") {
    for (double tau : {0.0, 0.2, 0.5, 0.7}) {
        const SystemParams p(5.0, tau);
        const QuantizerCodebook cb1({0.0, 0.05, 0.3, 0.31, 1.0, 2.5, 2.6, 7.0});
        const QuantizerCodebook cb2({0.0, 0.2, 0.9, 1.4});
        for (auto m : {AllocationMethod::NomaClosedForm, AllocationMethod::AnomaUpperZ1,
                       AllocationMethod::AnomaExact}) {
            const auto r = monte_carlo(cb1, cb2, kD1, kD2, p, m, spec_with(50000, 5));
            CHECK(r.outage_count == 0);
        }
    }
}

TEST_CASE("results depend only on seed, sample count and block size") {
    const auto cb1 = uniform_codebook(0.5, 2);
    const auto cb2 = uniform_codebook(1.0, 2);
    const auto one = monte_carlo(cb1, cb2, kD1, kD2, kParams, AllocationMethod::AnomaLowerZ05,
                                 spec_with(100000, 7, 1, 4096));
    const auto four = monte_carlo(cb1, cb2, kD1, kD2, kParams, AllocationMethod::AnomaLowerZ05,
                                  spec_with(100000, 7, 4, 4096));
    CHECK(one.estimate == four.estimate);
    CHECK(one.standard_error == four.standard_error);
    CHECK(one.order_mismatch_count == four.order_mismatch_count);

    const auto other_seed = monte_carlo(cb1, cb2, kD1, kD2, kParams,
                                        AllocationMethod::AnomaLowerZ05, spec_with(100000, 8, 1, 4096));
    CHECK(other_seed.estimate != one.estimate);
    CHECK(one.seed == 7);
    CHECK(one.n_samples == 100000);
}

TEST_CASE("standard error shrinks like 1/sqrt(n)") {
    const auto cb1 = uniform_codebook(0.5, 3);
    const auto cb2 = uniform_codebook(1.0, 3);
    const double closed =
        expected_rate(cb1, cb2, kD1, kD2, kParams, AllocationMethod::NomaClosedForm).expected_maxmin;
    double prev_se = 0.0;
    for (std::uint64_t n : {10'000ull, 100'000ull, 1'000'000ull}) {
        const auto r = monte_carlo(cb1, cb2, kD1, kD2, kParams, AllocationMethod::NomaClosedForm,
                                   spec_with(n, 2024));
        CHECK(std::fabs(r.estimate - closed) <= 3.0 * r.standard_error);
        if (prev_se > 0.0) {
            const double ratio = prev_se / r.standard_error;
            CHECK(ratio == doctest::Approx(std::sqrt(10.0)).epsilon(0.1));
        }
        prev_se = r.standard_error;
    }
}

TEST_CASE("invalid specs are rejected") {
    const auto cb = QuantizerCodebook::zero();
    CHECK_THROWS_AS(monte_carlo(cb, cb, kD1, kD2, kParams, AllocationMethod::NomaClosedForm,
                                spec_with(0, 1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(monte_carlo(cb, cb, kD1, kD2, kParams, AllocationMethod::NomaClosedForm,
                                spec_with(10, 1, 1, 0)),
                    std::invalid_argument);
}
