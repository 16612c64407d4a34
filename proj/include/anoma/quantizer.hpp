// Scalar quantizer for channel gains.
//
// A codebook holds N = 2^b ascending levels with q_0 = 0. Bin i covers
// [q_i, q_{i+1}) and the top bin [q_{N-1}, +inf) is unbounded. Quantizing
// to the left edge of the bin never overstates the gain, so rates computed
// from quantized gains never exceed the true channel capacity.
#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "anoma/distribution.hpp"

namespace anoma {

class QuantizerCodebook {
public:
    /// Throws std::invalid_argument unless levels[0] == 0, the levels are
    /// finite and strictly increasing, and levels.size() is a power of two.
    explicit QuantizerCodebook(std::vector<double> levels);

    /// Single level {0}; the zero-bit codebook.
    static QuantizerCodebook zero();

    std::span<const double> levels() const noexcept { return levels_; }
    std::size_t size() const noexcept { return levels_.size(); }
    int bits() const noexcept { return bits_; }
    double operator[](std::size_t i) const { return levels_.at(i); }

    /// Upper edge of bin i; +infinity for the top bin.
    double upper_edge(std::size_t i) const;

    /// Index of the bin containing x (x >= 0).
    std::size_t bin_of(double x) const;

    friend bool operator==(const QuantizerCodebook&, const QuantizerCodebook&) = default;

private:
    std::vector<double> levels_;
    int bits_ = 0;
};

/// Largest level not exceeding x. Throws std::invalid_argument for x < 0.
double quantize(const QuantizerCodebook& codebook, double x);

enum class LogBase { Natural, Binary };

struct UniformDesign {
    QuantizerCodebook codebook;
    double spacing;    // Delta
    double top_level;  // L = (N - 1) Delta
};

/// Uniform baseline: levels {0, D, ..., (N-1) D} where D solves
/// (N - 1) D = log(1 / D) / (lambda D). bits = 0 gives {0}.
/// Throws ConvergenceError if the root is not bracketed in (0, 1).
UniformDesign uniform_design(double lambda, int bits, LogBase base = LogBase::Natural);

QuantizerCodebook uniform_codebook(double lambda, int bits, LogBase base = LogBase::Natural);

/// Probability that a gain drawn from dist falls in bin i. Throws
/// std::out_of_range for i >= N.
double bin_mass(const QuantizerCodebook& codebook, const ChannelDistribution& dist,
                std::size_t bin_index);

/// Plain-text format: one level per line, ascending, full round-trip precision.
void write_codebook(std::ostream& out, const QuantizerCodebook& codebook);
void write_codebook(const std::filesystem::path& path, const QuantizerCodebook& codebook);

/// Throws std::runtime_error on malformed input or unreadable file.
QuantizerCodebook read_codebook(std::istream& in);
QuantizerCodebook read_codebook(const std::filesystem::path& path);

}  // namespace anoma
