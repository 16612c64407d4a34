// Average max-min rate of a limited-feedback system, its full-CSI bound and
// the quantization distortion between them.
#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "anoma/allocation.hpp"
#include "anoma/distribution.hpp"
#include "anoma/quadrature.hpp"
#include "anoma/quantizer.hpp"

namespace anoma {

/// Max-min rate the BS assigns for the gain pair (h1, h2) under method.
double maxmin_rate(AllocationMethod method, double h1, double h2, const SystemParams& params);

/// One (i, j) cell of the expectation: both users report bins i and j.
struct BinTerm {
    std::size_t i;
    std::size_t j;
    double level1;
    double level2;
    double alpha;
    double rate;
    double mass;
    double contribution;  // rate * mass
};

struct RateReport {
    AllocationMethod method = AllocationMethod::NomaClosedForm;
    std::size_t rows = 0;  // bins of user 1
    std::size_t cols = 0;  // bins of user 2
    std::vector<BinTerm> per_bin;  // row-major
    double expected_maxmin = 0.0;
    std::optional<double> full_csi;

    const BinTerm& at(std::size_t i, std::size_t j) const { return per_bin.at(i * cols + j); }
};

/// Exact expectation of the max-min rate when both users feed back
/// quantized gains: sum over bin pairs of R*(q_i1, q_j2) times the bin masses.
RateReport expected_rate(const QuantizerCodebook& cb1, const QuantizerCodebook& cb2,
                         const ChannelDistribution& d1, const ChannelDistribution& d2,
                         const SystemParams& params, AllocationMethod method);

/// Average max-min rate with unquantized gains. Throws std::runtime_error if
/// the quadrature error estimate exceeds spec.max_error.
double full_csi_rate(const ChannelDistribution& d1, const ChannelDistribution& d2,
                     const SystemParams& params, AllocationMethod method,
                     const QuadratureSpec& spec = {});

/// expected_rate plus the full-CSI bound for the same method.
RateReport evaluate(const QuantizerCodebook& cb1, const QuantizerCodebook& cb2,
                    const ChannelDistribution& d1, const ChannelDistribution& d2,
                    const SystemParams& params, AllocationMethod method,
                    const QuadratureSpec& spec = {});

/// full_csi - expected_maxmin. Throws std::logic_error if the bound is missing
/// or the gap is below -tolerance (mismatched method or parameters).
double distortion(const RateReport& report, double tolerance = 1e-9);

/// CSV with header i,j,level1,level2,alpha,rate,mass,contribution.
void write_report_csv(std::ostream& out, const RateReport& report);

}  // namespace anoma
