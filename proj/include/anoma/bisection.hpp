// Bracketing root finder for monotone scalar functions.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace anoma {

struct Bracket {
    double lo;
    double hi;
};

/// Thrown when a bracketing solver stops without meeting its tolerance.
/// Carries the last bracket for diagnosis.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, Bracket last)
        : std::runtime_error(what), bracket_(last) {}

    Bracket bracket() const noexcept { return bracket_; }

private:
    Bracket bracket_;
};

struct BisectionResult {
    double root;
    double value;  // f(root)
    int iterations;
    Bracket bracket;
};

/// Bisection on [lo, hi] where f(lo) and f(hi) have opposite signs.
///
/// Stops once |f(mid)| <= value_tol and the bracket is narrower than x_tol,
/// or once the bracket cannot be split further in double precision.
/// Throws ConvergenceError if the endpoints do not bracket a sign change or
/// max_iterations is exhausted first.
template <class F>
BisectionResult bisect(F&& f, double lo, double hi, double x_tol, double value_tol,
                       int max_iterations = 200) {
    double f_lo = f(lo);
    double f_hi = f(hi);
    if (f_lo == 0.0) return {lo, f_lo, 0, {lo, lo}};
    if (f_hi == 0.0) return {hi, f_hi, 0, {hi, hi}};
    if (std::signbit(f_lo) == std::signbit(f_hi))
        throw ConvergenceError("bisect: endpoints do not bracket a root", {lo, hi});

    for (int it = 1; it <= max_iterations; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        const double f_mid = f(mid);
        if (f_mid == 0.0) return {mid, f_mid, it, {mid, mid}};
        if (std::signbit(f_mid) == std::signbit(f_lo)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
        const double next = lo + 0.5 * (hi - lo);
        const bool collapsed = !(next > lo && next < hi);
        if ((std::fabs(f_mid) <= value_tol && hi - lo <= x_tol) || collapsed) {
            const bool take_lo = std::fabs(f_lo) <= std::fabs(f_hi);
            return {take_lo ? lo : hi, take_lo ? f_lo : f_hi, it, {lo, hi}};
        }
    }
    throw ConvergenceError("bisect: no convergence after " + std::to_string(max_iterations) +
                               " iterations",
                           {lo, hi});
}

}  // namespace anoma
