#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include "anoma/evaluation.hpp"
#include "anoma/monte_carlo.hpp"

using namespace anoma;

namespace {

const SystemParams kParams(10.0, 0.5);
const ChannelDistribution kD1(0.5), kD2(1.0);

constexpr AllocationMethod kMethods[] = {
    AllocationMethod::NomaClosedForm, AllocationMethod::AnomaLowerZ05,
    AllocationMethod::AnomaUpperZ1, AllocationMethod::AnomaExact};

// Nested adaptive Gauss-Kronrod over [0, inf)^2, inner range split at h1.
double adaptive_full_csi(AllocationMethod m, const SystemParams& p) {
    using boost::math::quadrature::gauss_kronrod;
    const double inf = std::numeric_limits<double>::infinity();
    auto outer = [&](double h1) {
        auto inner = [&](double h2) { return maxmin_rate(m, h1, h2, p) * kD2.pdf(h2); };
        const double below = h1 > 0 ? gauss_kronrod<double, 31>::integrate(inner, 0.0, h1, 10, 1e-12) : 0.0;
        const double above = gauss_kronrod<double, 31>::integrate(inner, h1, inf, 10, 1e-12);
        return (below + above) * kD1.pdf(h1);
    };
    return gauss_kronrod<double, 31>::integrate(outer, 0.0, inf, 10, 1e-11);
}

QuantizerCodebook random_codebook(std::mt19937_64& rng, int bits, double scale) {
    std::exponential_distribution<double> gap(1.0 / scale);
    std::vector<double> levels{0.0};
    for (std::size_t k = 1; k < (std::size_t{1} << bits); ++k)
        levels.push_back(levels.back() + 1e-3 + gap(rng));
    return QuantizerCodebook(std::move(levels));
}

// Doubles the codebook by inserting one level inside every bin.
QuantizerCodebook refine(const QuantizerCodebook& cb, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    std::vector<double> out;
    for (std::size_t i = 0; i < cb.size(); ++i) {
        out.push_back(cb[i]);
        const double hi = i + 1 < cb.size() ? cb[i + 1] : cb[i] + 2.0;
        out.push_back(cb[i] + unit(rng) * (hi - cb[i]));
    }
    return QuantizerCodebook(std::move(out));
}

}  // namespace

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
    for (int n : {1, 2, 3, 7, 64, 512}) {
        const auto rule = gauss_legendre(n);
        double wsum = 0.0;
        for (double w : rule.weights) wsum += w;
        CHECK(wsum == doctest::Approx(2.0).epsilon(1e-13));
        for (int deg = 0; deg <= std::min(2 * n - 1, 40); ++deg) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += rule.weights[k] * std::pow(rule.nodes[k], deg);
            const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
            CHECK(std::fabs(s - exact) <= 1e-13);
        }
        for (int k = 1; k < n; ++k) CHECK(rule.nodes[k] > rule.nodes[k - 1]);
    }
    CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
}

TEST_CASE("gain-pair integrator on integrands with known expectations") {
    const auto zero = integrate_gain_pair(kD1, kD2, [](double, double) { return 0.0; });
    CHECK(zero.value == 0.0);
    const auto one = integrate_gain_pair(kD1, kD2, [](double, double) { return 1.0; });
    CHECK(one.value == doctest::Approx(1.0).epsilon(1e-9));
    const auto mean1 = integrate_gain_pair(kD1, kD2, [](double h1, double) { return h1; });
    CHECK(mean1.value == doctest::Approx(2.0).epsilon(1e-8));
    // E[max(H1, H2)] = 1/l1 + 1/l2 - 1/(l1 + l2)
    const auto emax = integrate_gain_pair(kD1, kD2, [](double a, double b) { return std::max(a, b); });
    CHECK(emax.value == doctest::Approx(2.0 + 1.0 - 1.0 / 1.5).epsilon(1e-8));
    CHECK(emax.error_estimate < 1e-8);
}

TEST_CASE("expected_rate examples") {
    for (auto m : kMethods) {
        const auto r = expected_rate(QuantizerCodebook::zero(), QuantizerCodebook::zero(), kD1, kD2,
                                     kParams, m);
        CHECK(r.expected_maxmin == 0.0);
        CHECK(r.per_bin.size() == 1);
    }
    const QuantizerCodebook cb({0.0, 1.0});
    const auto r = expected_rate(cb, cb, kD1, kD2, SystemParams(10.0, 0.5),
                                 AllocationMethod::NomaClosedForm);
    const double expected = std::log2(std::sqrt(11.0)) * std::exp(-0.5) * std::exp(-1.0);
    CHECK(r.expected_maxmin == doctest::Approx(expected).epsilon(1e-14));
    CHECK(r.expected_maxmin == doctest::Approx(0.38596).epsilon(1e-4));
    CHECK(r.at(1, 1).alpha == doctest::Approx(1.0 / (1.0 + std::sqrt(11.0))).epsilon(1e-15));
}

TEST_CASE("per-bin terms are consistent") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const auto cb1 = random_codebook(rng, 3, 0.8);
        const auto cb2 = random_codebook(rng, 2, 0.4);
        for (auto m : kMethods) {
            const auto r = expected_rate(cb1, cb2, kD1, kD2, kParams, m);
            REQUIRE(r.rows == 8);
            REQUIRE(r.cols == 4);
            double total = 0.0, mass = 0.0;
            for (const auto& t : r.per_bin) {
                CHECK(t.contribution >= 0.0);
                CHECK(t.contribution == t.rate * t.mass);
                if (t.i == 0 || t.j == 0) CHECK(t.contribution == 0.0);
                total += t.contribution;
                mass += t.mass;
            }
            CHECK(total == r.expected_maxmin);
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("full-CSI rate matches an independent adaptive quadrature") {
    for (auto m : {AllocationMethod::NomaClosedForm, AllocationMethod::AnomaUpperZ1}) {
        const double value = full_csi_rate(kD1, kD2, kParams, m);
        CHECK(value == doctest::Approx(adaptive_full_csi(m, kParams)).epsilon(1e-7));
    }
}

TEST_CASE("full-CSI NOMA rate matches 10^7 Monte Carlo draws") {
    const double value = full_csi_rate(kD1, kD2, kParams, AllocationMethod::NomaClosedForm);
    MonteCarloSpec spec;
    spec.n_samples = 10'000'000;
    spec.seed = 4242;
    const auto mc = monte_carlo_full_csi(kD1, kD2, kParams, AllocationMethod::NomaClosedForm, spec);
    CHECK(std::fabs(mc.estimate - value) <= 3.0 * mc.standard_error);
}

TEST_CASE("full-CSI rates follow the coefficient ordering") {
    const double noma = full_csi_rate(kD1, kD2, kParams, AllocationMethod::NomaClosedForm);
    const double lower = full_csi_rate(kD1, kD2, kParams, AllocationMethod::AnomaLowerZ05);
    const double exact = full_csi_rate(kD1, kD2, kParams, AllocationMethod::AnomaExact);
    const double upper = full_csi_rate(kD1, kD2, kParams, AllocationMethod::AnomaUpperZ1);
    CHECK(noma < lower);
    CHECK(lower < exact);
    CHECK(exact < upper);

    QuadratureSpec tight;
    tight.nodes = 8;
    tight.max_error = 1e-14;
    CHECK_THROWS_AS(full_csi_rate(kD1, kD2, kParams, AllocationMethod::NomaClosedForm, tight),
                    std::runtime_error);
}

TEST_CASE("limited feedback stays strictly below full CSI and improves under refinement") {
    std::mt19937_64 rng(42);
    for (auto m : kMethods) {
        const double bound = full_csi_rate(kD1, kD2, kParams, m);
        for (int trial = 0; trial < 10; ++trial) {
            auto cb1 = random_codebook(rng, 1 + trial % 3, 1.0);
            auto cb2 = random_codebook(rng, 1 + trial % 3, 0.5);
            double prev = expected_rate(cb1, cb2, kD1, kD2, kParams, m).expected_maxmin;
            CHECK(prev < bound);
            for (int step = 0; step < 3; ++step) {
                if (step % 2 == 0) cb1 = refine(cb1, rng); else cb2 = refine(cb2, rng);
                const double cur = expected_rate(cb1, cb2, kD1, kD2, kParams, m).expected_maxmin;
                CHECK(cur >= prev - 1e-12);
                CHECK(cur < bound);
                prev = cur;
            }
        }
    }
}

TEST_CASE("distortion") {
    const auto zero = evaluate(QuantizerCodebook::zero(), QuantizerCodebook::zero(), kD1, kD2,
                               kParams, AllocationMethod::NomaClosedForm);
    CHECK(distortion(zero) == *zero.full_csi);

    auto report3 = evaluate(uniform_codebook(0.5, 3), uniform_codebook(1.0, 3), kD1, kD2, kParams,
                            AllocationMethod::NomaClosedForm);
    auto report12 = evaluate(uniform_codebook(0.5, 12), uniform_codebook(1.0, 12), kD1, kD2,
                             kParams, AllocationMethod::NomaClosedForm);
    const double d3 = distortion(report3);
    CHECK(d3 > 0.0);
    CHECK(std::isfinite(d3));
    CHECK(distortion(report12) < d3);
    CHECK(distortion(report12) > 0.0);

    RateReport missing = report3;
    missing.full_csi.reset();
    CHECK_THROWS_AS(distortion(missing), std::logic_error);
    RateReport mismatched = report3;
    mismatched.full_csi = report3.expected_maxmin - 0.1;
    CHECK_THROWS_AS(distortion(mismatched), std::logic_error);
}

TEST_CASE("rate report CSV") {
    const auto r = expected_rate(QuantizerCodebook({0.0, 1.0}), QuantizerCodebook({0.0, 2.0}), kD1,
                                 kD2, kParams, AllocationMethod::AnomaLowerZ05);
    std::ostringstream out;
    write_report_csv(out, r);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "i,j,level1,level2,alpha,rate,mass,contribution");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 7);
    }
    CHECK(rows == 4);
    CHECK(out.str().find("\n1,1,1,2,") != std::string::npos);
}
