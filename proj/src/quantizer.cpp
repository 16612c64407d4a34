#include "anoma/quantizer.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "anoma/bisection.hpp"

namespace anoma {

QuantizerCodebook::QuantizerCodebook(std::vector<double> levels) : levels_(std::move(levels)) {
    if (levels_.empty() || !std::has_single_bit(levels_.size()))
        throw std::invalid_argument("QuantizerCodebook: level count must be a power of two, got " +
                                    std::to_string(levels_.size()));
    if (levels_.front() != 0.0)
        throw std::invalid_argument("QuantizerCodebook: first level must be 0");
    for (std::size_t i = 1; i < levels_.size(); ++i) {
        if (!std::isfinite(levels_[i]) || !(levels_[i] > levels_[i - 1]))
            throw std::invalid_argument("QuantizerCodebook: levels must be finite and strictly "
                                        "increasing (violated at index " +
                                        std::to_string(i) + ")");
    }
    bits_ = std::countr_zero(levels_.size());
}

QuantizerCodebook QuantizerCodebook::zero() { return QuantizerCodebook({0.0}); }

double QuantizerCodebook::upper_edge(std::size_t i) const {
    if (i >= levels_.size()) throw std::out_of_range("QuantizerCodebook: bin index out of range");
    return i + 1 < levels_.size() ? levels_[i + 1] : std::numeric_limits<double>::infinity();
}

std::size_t QuantizerCodebook::bin_of(double x) const {
    if (!(x >= 0.0)) throw std::invalid_argument("quantize: gain must be nonnegative");
    const auto it = std::upper_bound(levels_.begin(), levels_.end(), x);
    return static_cast<std::size_t>(it - levels_.begin()) - 1;
}

double quantize(const QuantizerCodebook& codebook, double x) {
    return codebook.levels()[codebook.bin_of(x)];
}

UniformDesign uniform_design(double lambda, int bits, LogBase base) {
    if (!(lambda > 0.0)) throw std::invalid_argument("uniform_codebook: lambda must be positive");
    if (bits < 0 || bits > 24)
        throw std::invalid_argument("uniform_codebook: bits must lie in [0, 24]");
    if (bits == 0) return {QuantizerCodebook::zero(), 0.0, 0.0};

    const double n_minus_1 = static_cast<double>((std::size_t{1} << bits) - 1);
    const double log_scale = base == LogBase::Natural ? 1.0 : 1.0 / std::log(2.0);
    // (N-1) D = log(1/D) / (lambda D)  <=>  (N-1) lambda D^2 + log(D) = 0, increasing in D.
    auto residual = [&](double d) { return n_minus_1 * lambda * d * d + log_scale * std::log(d); };
    const double spacing = bisect(residual, 1e-300, 1.0, 1e-15, 1e-15).root;

    std::vector<double> levels(std::size_t{1} << bits);
    for (std::size_t i = 0; i < levels.size(); ++i) levels[i] = static_cast<double>(i) * spacing;
    return {QuantizerCodebook(std::move(levels)), spacing, n_minus_1 * spacing};
}

QuantizerCodebook uniform_codebook(double lambda, int bits, LogBase base) {
    return uniform_design(lambda, bits, base).codebook;
}

double bin_mass(const QuantizerCodebook& codebook, const ChannelDistribution& dist,
                std::size_t bin_index) {
    if (bin_index >= codebook.size())
        throw std::out_of_range("bin_mass: bin index " + std::to_string(bin_index) +
                                " out of range for " + std::to_string(codebook.size()) + " bins");
    const double lo = codebook.levels()[bin_index];
    if (bin_index + 1 == codebook.size()) return dist.survival(lo);
    return dist.survival(lo) - dist.survival(codebook.levels()[bin_index + 1]);
}

void write_codebook(std::ostream& out, const QuantizerCodebook& codebook) {
    char buf[64];
    for (double level : codebook.levels()) {
        const auto res = std::to_chars(buf, buf + sizeof buf, level);
        out.write(buf, res.ptr - buf);
        out.put('\n');
    }
}

void write_codebook(const std::filesystem::path& path, const QuantizerCodebook& codebook) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_codebook(out, codebook);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

QuantizerCodebook read_codebook(std::istream& in) {
    std::vector<double> levels;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto last = line.find_last_not_of(" \t\r");
        double value = 0.0;
        const char* begin = line.data() + first;
        const char* end = line.data() + last + 1;
        const auto res = std::from_chars(begin, end, value);
        if (res.ec != std::errc{} || res.ptr != end)
            throw std::runtime_error("codebook line " + std::to_string(line_no) +
                                     ": not a number: '" + line + "'");
        levels.push_back(value);
    }
    try {
        return QuantizerCodebook(std::move(levels));
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("invalid codebook: ") + e.what());
    }
}

QuantizerCodebook read_codebook(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open codebook " + path.string());
    return read_codebook(in);
}

}  // namespace anoma
