#include "anoma/evaluation.hpp"

#include <ostream>
#include <stdexcept>

#include "anoma/csv.hpp"

namespace anoma {

double maxmin_rate(AllocationMethod method, double h1, double h2, const SystemParams& params) {
    return allocate(method, ChannelGain(h1), ChannelGain(h2), params).maxmin_rate;
}

RateReport expected_rate(const QuantizerCodebook& cb1, const QuantizerCodebook& cb2,
                         const ChannelDistribution& d1, const ChannelDistribution& d2,
                         const SystemParams& params, AllocationMethod method) {
    RateReport report;
    report.method = method;
    report.rows = cb1.size();
    report.cols = cb2.size();
    report.per_bin.reserve(cb1.size() * cb2.size());

    std::vector<double> mass2(cb2.size());
    for (std::size_t j = 0; j < cb2.size(); ++j) mass2[j] = bin_mass(cb2, d2, j);

    double total = 0.0;
    for (std::size_t i = 0; i < cb1.size(); ++i) {
        const double mass1 = bin_mass(cb1, d1, i);
        for (std::size_t j = 0; j < cb2.size(); ++j) {
            const auto alloc = allocate(method, ChannelGain(cb1[i]), ChannelGain(cb2[j]), params);
            const double mass = mass1 * mass2[j];
            const double contribution = alloc.maxmin_rate * mass;
            report.per_bin.push_back(
                {i, j, cb1[i], cb2[j], alloc.alpha.value(), alloc.maxmin_rate, mass, contribution});
            total += contribution;
        }
    }
    report.expected_maxmin = total;
    return report;
}

double full_csi_rate(const ChannelDistribution& d1, const ChannelDistribution& d2,
                     const SystemParams& params, AllocationMethod method,
                     const QuadratureSpec& spec) {
    const auto result = integrate_gain_pair(
        d1, d2, [&](double h1, double h2) { return maxmin_rate(method, h1, h2, params); }, spec);
    if (result.error_estimate > spec.max_error)
        throw std::runtime_error("full_csi_rate: quadrature error estimate " +
                                 std::to_string(result.error_estimate) + " exceeds " +
                                 std::to_string(spec.max_error));
    return result.value;
}

RateReport evaluate(const QuantizerCodebook& cb1, const QuantizerCodebook& cb2,
                    const ChannelDistribution& d1, const ChannelDistribution& d2,
                    const SystemParams& params, AllocationMethod method,
                    const QuadratureSpec& spec) {
    RateReport report = expected_rate(cb1, cb2, d1, d2, params, method);
    report.full_csi = full_csi_rate(d1, d2, params, method, spec);
    return report;
}

double distortion(const RateReport& report, double tolerance) {
    if (!report.full_csi) throw std::logic_error("distortion: report has no full-CSI rate");
    const double gap = *report.full_csi - report.expected_maxmin;
    if (gap < -tolerance)
        throw std::logic_error("distortion: limited-feedback rate exceeds the full-CSI bound by " +
                               std::to_string(-gap));
    return gap;
}

void write_report_csv(std::ostream& out, const RateReport& report) {
    CsvWriter csv(out);
    csv.row("i", "j", "level1", "level2", "alpha", "rate", "mass", "contribution");
    for (const auto& t : report.per_bin)
        csv.row(t.i, t.j, t.level1, t.level2, t.alpha, t.rate, t.mass, t.contribution);
}

}  // namespace anoma
