// Two-user downlink rate model for synchronous (NOMA) and asynchronous
// (ANOMA) superposition transmission.
#pragma once

#include <utility>

namespace anoma {

/// Total BS power and normalized timing offset. The timing factor
/// Q = 2 tau (1 - tau) is computed once at construction.
class SystemParams {
public:
    /// Throws std::invalid_argument unless total_power > 0 and 0 <= tau < 1.
    SystemParams(double total_power, double tau);

    double total_power() const noexcept { return total_power_; }
    double tau() const noexcept { return tau_; }
    double q_factor() const noexcept { return q_factor_; }

    /// Same power, different timing offset.
    SystemParams with_tau(double tau) const { return {total_power_, tau}; }

private:
    double total_power_;
    double tau_;
    double q_factor_;
};

/// Linear channel gain |h|^2.
class ChannelGain {
public:
    constexpr ChannelGain() = default;
    /// Throws std::invalid_argument for negative or non-finite gains.
    explicit ChannelGain(double value);

    constexpr double value() const noexcept { return value_; }

    friend constexpr auto operator<=>(ChannelGain, ChannelGain) = default;

private:
    double value_ = 0.0;
};

/// Fraction of the total power given to the SIC (strong) user.
class PowerCoefficient {
public:
    constexpr PowerCoefficient() = default;
    /// Throws std::invalid_argument outside [0, 1].
    explicit PowerCoefficient(double alpha);

    constexpr double value() const noexcept { return alpha_; }

    friend constexpr auto operator<=>(PowerCoefficient, PowerCoefficient) = default;

private:
    double alpha_ = 0.0;
};

enum class User { User1, User2 };

constexpr User other(User u) noexcept { return u == User::User1 ? User::User2 : User::User1; }

/// log2(1 + alpha P H). Same expression for NOMA and ANOMA.
double rate_strong(ChannelGain h, PowerCoefficient alpha, const SystemParams& params);

/// Weak-user rate with sampling diversity. Reduces to the NOMA rate
/// log2((1 + P H) / (1 + alpha P H)) when Q = 0.
double rate_weak(ChannelGain h, PowerCoefficient alpha, const SystemParams& params);

/// Radicand of the weak-user rate, evaluated as (A - B)(A + B).
double weak_rate_radicand(ChannelGain h, PowerCoefficient alpha, const SystemParams& params);

struct RatePair {
    double strong;
    double weak;
};

RatePair rate_pair(ChannelGain h_strong, ChannelGain h_weak, PowerCoefficient alpha,
                   const SystemParams& params);

}  // namespace anoma
