#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "valuation_lab/parallel.hpp"

namespace vlab {

enum class NoiseKind { Gaussian, Empirical };

struct GrowthSource {
    enum class Kind { HistoricalBlocks, Constant };
    Kind kind = Kind::Constant;
    double g = 0.0;
    std::vector<double> history;
};

/// B(t) = alpha + beta B(t-1) + eps(t); R(t) = B(t) - B(t-1) + c + G(t).
struct DiscreteModelSpec {
    double alpha = 0.0;
    double beta = 0.5;
    double c = 0.0;
    double sigma_eps = 0.0;
    NoiseKind noise = NoiseKind::Gaussian;
    std::vector<double> residual_pool;  ///< resampled when noise is Empirical
    GrowthSource g_source;

    /// Long-run mean alpha / (1 - beta).
    [[nodiscard]] double h() const { return alpha / (1.0 - beta); }
    /// @throws Error InvalidArgument unless 0 < beta < 1, sigma_eps >= 0, pool nonempty for Empirical
    void validate() const;
};

/// One innovation draw under spec.noise.
[[nodiscard]] double draw_noise(const DiscreteModelSpec& spec, Rng& rng);

/// B(0) = b0 followed by T AR(1) steps; length T+1.
[[nodiscard]] std::vector<double> simulate_ar1(const DiscreteModelSpec& spec, double b0, std::size_t T,
                                               std::uint64_t seed);
[[nodiscard]] std::vector<double> simulate_ar1(const DiscreteModelSpec& spec, double b0, std::size_t T, Rng& rng);

struct WithdrawalProcess {
    enum class Kind { None, ConstantFraction, ConstantReal, EarningsLinked, Custom };
    Kind kind = Kind::None;
    double w = 0.0;
    std::vector<double> series;  ///< Custom: W(1..T), entry k is W(k+1)

    static WithdrawalProcess none() { return {}; }
    static WithdrawalProcess constant_fraction(double w);
    static WithdrawalProcess constant_real(double w) { return {Kind::ConstantReal, w, {}}; }
    static WithdrawalProcess earnings_linked(double w) { return {Kind::EarningsLinked, w, {}}; }
    static WithdrawalProcess custom(std::vector<double> series) { return {Kind::Custom, 0.0, std::move(series)}; }
};

/**
 * @brief Trajectory on t = 0..T. Delta, G, R are NaN at t = 0.
 *
 * When wealth reaches zero or below (ConstantReal or Custom withdrawals) the path is
 * truncated at ruined_at.
 */
struct SimulatedPath {
    std::vector<double> B, Delta, G, R, V;
    std::optional<std::size_t> ruined_at;
    bool withdrawal_out_of_range = false;  ///< some W(t) fell outside (0, 1)
};

/**
 * @brief Assemble Delta(t) = B(t) - B(t-1) + c, R = Delta + G and wealth with withdrawals.
 *
 * B has length T+1, G has length T (entry k holds G(k+1)). V(0) = 1. ConstantReal subtracts
 * w after growth: V(t) = V(t-1) e^{R(t)} - w.
 *
 * @throws Error LengthMismatch
 */
[[nodiscard]] SimulatedPath path_from_components(std::span<const double> B, std::span<const double> G, double c,
                                                 const WithdrawalProcess& withdrawal);

[[nodiscard]] std::string path_to_csv(const SimulatedPath& path);
/// Inverse of path_to_csv; ruined_at and the range flag are not part of the CSV.
[[nodiscard]] SimulatedPath parse_path_csv(std::string_view content);

struct LlnReport {
    double delta_avg = 0.0;
    double b_avg = 0.0;
    double r_avg = 0.0;
    double c = 0.0;
    double h = 0.0;
    double g = 0.0;
    bool delta_pass = false;
    bool b_pass = false;
    bool r_pass = false;
    [[nodiscard]] bool all_pass() const { return delta_pass && b_pass && r_pass; }
};

/// Long-run averages of Delta, B and R on one simulated path with constant growth g.
[[nodiscard]] LlnReport check_lln(const DiscreteModelSpec& spec, double b0, std::size_t T, double g, double tol,
                                  std::uint64_t seed);

struct StationaryMoments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Mean h and variance sigma^2 / (1 - beta^2); accepts 0 <= beta < 1.
[[nodiscard]] StationaryMoments stationary_moments(const DiscreteModelSpec& spec);

/**
 * @brief Empirical total-variation distance between the laws of B(t) from two starts.
 *
 * n_paths independent paths per start (streams seed + i and seed + n_paths + i), binned on a
 * fixed grid of n_bins cells spanning 5 stationary sd beyond both starts plus two overflow
 * cells. With sigma_eps = 0 the distance is exact (0 or 1). Entry t covers t = 0..t_max.
 */
[[nodiscard]] std::vector<double> geometric_ergodicity_estimate(const DiscreteModelSpec& spec, double b0_a,
                                                                double b0_b, std::size_t t_max, std::size_t n_paths,
                                                                std::uint64_t seed, std::size_t n_bins = 24);

struct SustainabilityBounds {
    double safe_rate = 0.0;    ///< 1 - e^{-c-g}
    double unsafe_rate = 0.0;  ///< c + g
};

[[nodiscard]] SustainabilityBounds sustainability_bounds(double c, double g);

struct EarningsLinkedStats {
    std::vector<double> W;          ///< 1 - e^{w - G(t)}
    double mean_exp_neg_g = 0.0;    ///< mean of e^{-G}
    double mean_withdrawal = 0.0;   ///< M(w) = 1 - e^{w} mean(e^{-G})
};

[[nodiscard]] EarningsLinkedStats earnings_linked_stats(double w, std::span<const double> G_hist);

/// M(w) from a known mean of e^{-G}.
[[nodiscard]] double mean_withdrawal(double w, double mean_exp_neg_g);

}  // namespace vlab
