#include <cmath>
#include <random>
#include <sstream>

#include <doctest.h>

#include "anoma/allocation.hpp"
#include "anoma/bisection.hpp"
#include "anoma/quantizer.hpp"
#include "oracles.hpp"

using namespace anoma;

namespace {

QuantizerCodebook random_codebook(std::mt19937_64& rng, int bits, double scale) {
    std::exponential_distribution<double> gap(1.0 / scale);
    std::vector<double> levels{0.0};
    for (std::size_t k = 1; k < (std::size_t{1} << bits); ++k)
        levels.push_back(levels.back() + 1e-3 + gap(rng));
    return QuantizerCodebook(std::move(levels));
}

// Uniform spacing from the defining equation, solved by TOMS 748.
double oracle_spacing(double lambda, int bits) {
    const double n1 = static_cast<double>((1 << bits) - 1);
    return oracle::root([&](double d) { return n1 * d - std::log(1.0 / d) / (lambda * d); }, 1e-6,
                        1.0);
}

}  // namespace

TEST_CASE("codebook construction enforces the level invariants") {
    CHECK_NOTHROW(QuantizerCodebook({0.0, 1.0, 2.0, 3.0}));
    CHECK(QuantizerCodebook({0.0, 1.0, 2.0, 3.0}).bits() == 2);
    CHECK(QuantizerCodebook::zero().bits() == 0);
    CHECK_THROWS_AS(QuantizerCodebook({}), std::invalid_argument);
    CHECK_THROWS_AS(QuantizerCodebook({0.5, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(QuantizerCodebook({0.0, 1.0, 1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(QuantizerCodebook({0.0, 2.0, 1.0, 3.0}), std::invalid_argument);
    CHECK_THROWS_AS(QuantizerCodebook({0.0, 1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(QuantizerCodebook({0.0, 1.0, 2.0, INFINITY}), std::invalid_argument);
}

TEST_CASE("quantize examples") {
    const QuantizerCodebook cb({0.0, 1.0, 2.0, 3.0});
    CHECK(quantize(cb, 2.5) == 2.0);
    CHECK(quantize(cb, 0.0) == 0.0);
    CHECK(quantize(cb, 100.0) == 3.0);
    CHECK(quantize(cb, 1.0) == 1.0);
    CHECK(quantize(cb, std::nextafter(1.0, 0.0)) == 0.0);
    CHECK_THROWS_AS(quantize(cb, -0.1), std::invalid_argument);
}

TEST_CASE("quantize never overstates the gain and is monotone") {
    std::mt19937_64 rng(31);
    std::exponential_distribution<double> x(0.3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto cb = random_codebook(rng, 1 + trial % 5, 0.7);
        double prev_x = 0.0, prev_q = 0.0;
        std::vector<double> xs(400);
        for (auto& v : xs) v = x(rng);
        std::sort(xs.begin(), xs.end());
        for (double v : xs) {
            const double q = quantize(cb, v);
            CHECK(q <= v);
            CHECK(std::find(cb.levels().begin(), cb.levels().end(), q) != cb.levels().end());
            if (v >= prev_x) CHECK(q >= prev_q);
            prev_x = v;
            prev_q = q;
        }
    }
}

TEST_CASE("quantized gains never raise either rate") {
    std::mt19937_64 rng(32);
    std::exponential_distribution<double> x(0.5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto cb = uniform_codebook(0.5, 3);
    for (int k = 0; k < 20000; ++k) {
        const double h = x(rng);
        const ChannelGain q(quantize(cb, h));
        const PowerCoefficient a(unit(rng));
        const SystemParams p(10.0, 0.99 * unit(rng));
        CHECK(rate_strong(q, a, p) <= rate_strong(ChannelGain(h), a, p));
        CHECK(rate_weak(q, a, p) <= rate_weak(ChannelGain(h), a, p));
    }
}

TEST_CASE("uniform_codebook examples") {
    const auto d13 = uniform_design(1.0, 3);
    CHECK(d13.spacing == doctest::Approx(oracle_spacing(1.0, 3)).epsilon(1e-12));
    CHECK(d13.spacing == doctest::Approx(0.3745).epsilon(1e-3));
    CHECK(d13.top_level == doctest::Approx(7.0 * oracle_spacing(1.0, 3)).epsilon(1e-12));
    // 2.6215 is 7 x the rounded spacing 0.3745
    CHECK(d13.top_level == doctest::Approx(2.6215).epsilon(1e-3));

    const auto d53 = uniform_design(0.5, 3);
    CHECK(d53.spacing == doctest::Approx(oracle_spacing(0.5, 3)).epsilon(1e-12));
    CHECK(d53.spacing == doctest::Approx(0.467).epsilon(1e-3));
    CHECK(d53.top_level == doctest::Approx(3.27).epsilon(1e-3));

    const auto d11 = uniform_design(1.0, 1);
    CHECK(d11.spacing == doctest::Approx(oracle_spacing(1.0, 1)).epsilon(1e-12));
    CHECK(d11.spacing == d11.top_level);
    CHECK(d11.spacing == doctest::Approx(0.6529).epsilon(1e-4));

    CHECK(uniform_codebook(1.0, 0) == QuantizerCodebook::zero());
    CHECK_THROWS_AS(uniform_codebook(0.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(uniform_codebook(1.0, -1), std::invalid_argument);
}

TEST_CASE("uniform levels are equally spaced and satisfy the defining equation") {
    for (double lambda : {0.25, 0.5, 1.0, 2.0, 7.0}) {
        for (int bits = 1; bits <= 10; ++bits) {
            for (auto base : {LogBase::Natural, LogBase::Binary}) {
                const auto d = uniform_design(lambda, bits, base);
                const auto levels = d.codebook.levels();
                REQUIRE(levels.size() == (std::size_t{1} << bits));
                for (std::size_t k = 0; k < levels.size(); ++k)
                    CHECK(levels[k] == doctest::Approx(k * d.spacing).epsilon(1e-15));
                const double log_inv = base == LogBase::Natural ? std::log(1.0 / d.spacing)
                                                                : std::log2(1.0 / d.spacing);
                const double rhs = log_inv / (lambda * d.spacing);
                CHECK(std::fabs(d.top_level - rhs) <= 1e-9 * rhs);
            }
        }
    }
}

TEST_CASE("bin_mass examples") {
    const QuantizerCodebook cb({0.0, 1.0});
    const ChannelDistribution unit(1.0);
    CHECK(bin_mass(cb, unit, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(bin_mass(cb, unit, 0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
    CHECK_THROWS_AS(bin_mass(cb, unit, 2), std::out_of_range);

    const QuantizerCodebook four({0.0, 1.0, 2.0, 3.0});
    const ChannelDistribution half(0.5);
    double total = 0.0;
    for (std::size_t i = 0; i < 4; ++i) total += bin_mass(four, half, i);
    CHECK(std::fabs(total - 1.0) <= 1e-12);
    CHECK(bin_mass(QuantizerCodebook::zero(), half, 0) == 1.0);
}

TEST_CASE("bin masses are nonnegative and sum to one") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> rate(0.05, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto cb = random_codebook(rng, 1 + trial % 8, 1.0 / (1 + trial % 8));
        const ChannelDistribution d(rate(rng));
        double total = 0.0;
        for (std::size_t i = 0; i < cb.size(); ++i) {
            const double m = bin_mass(cb, d, i);
            CHECK(m >= 0.0);
            total += m;
        }
        CHECK(std::fabs(total - 1.0) <= 1e-12);
    }
}

TEST_CASE("codebook text format round-trips exactly") {
    std::mt19937_64 rng(34);
    for (int trial = 0; trial < 100; ++trial) {
        const auto cb = random_codebook(rng, trial % 7, 0.37);
        std::stringstream ss;
        write_codebook(ss, cb);
        CHECK(read_codebook(ss) == cb);
    }
    std::stringstream commented("# uniform\n0\n\n0.5\n1.25  \n2\n");
    CHECK(read_codebook(commented) == QuantizerCodebook({0.0, 0.5, 1.25, 2.0}));
}

TEST_CASE("codebook reader rejects malformed input") {
    std::stringstream junk("0\nabc\n");
    CHECK_THROWS_AS(read_codebook(junk), std::runtime_error);
    std::stringstream unordered("0\n2\n1\n3\n");
    CHECK_THROWS_AS(read_codebook(unordered), std::runtime_error);
    std::stringstream empty("");
    CHECK_THROWS_AS(read_codebook(empty), std::runtime_error);
    CHECK_THROWS_AS(read_codebook(std::filesystem::path("/nonexistent/codebook.txt")),
                    std::runtime_error);
}
