#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "valuation_lab/parallel.hpp"

namespace vlab {

/// Factor drift f(h): linear Ornstein-Uhlenbeck -beta_rev (h - h_inf), or a user function.
struct CtDrift {
    enum class Kind { LinearOU, Custom };
    Kind kind = Kind::LinearOU;
    double beta_rev = 1.0;
    double h_inf = 0.0;
    std::function<double(double)> custom;
    double lipschitz = 0.0;  ///< declared bound for Custom

    static CtDrift linear_ou(double beta_rev, double h_inf) { return {Kind::LinearOU, beta_rev, h_inf, {}, 0.0}; }
    static CtDrift make_custom(std::function<double(double)> f, double lipschitz, double h_center = 0.0) {
        return {Kind::Custom, 0.0, h_center, std::move(f), lipschitz};
    }

    [[nodiscard]] double operator()(double h) const {
        return kind == Kind::LinearOU ? -beta_rev * (h - h_inf) : custom(h);
    }
    [[nodiscard]] double lipschitz_bound() const { return kind == Kind::LinearOU ? beta_rev : lipschitz; }
};

/**
 * @brief dH = f(H) dt + sigma dW; ln F has drift g and volatility rho, independent of W.
 *
 * Wealth is V = exp(c t + F + H). The risk-free real rate is r, or the yearly step function
 * r_steps (entry k applies on [k, k+1)) when nonempty.
 */
struct CtModelSpec {
    CtDrift drift;
    double sigma = 0.0;
    double g = 0.0;
    double rho = 0.0;
    double c = 0.0;
    double r = 0.0;
    std::vector<double> r_steps;

    [[nodiscard]] double rate_at(double t) const;
    [[nodiscard]] double total_variance() const { return sigma * sigma + rho * rho; }
    void validate() const;
};

struct JumpComponent {
    enum class Size { Fixed, Symmetric, Normal };
    double rate = 0.0;  ///< jumps per year
    Size size = Size::Symmetric;
    double a = 1.0;   ///< Fixed: jump a; Symmetric: +-a; Normal: mean a
    double sd = 0.0;  ///< Normal only

    [[nodiscard]] double mean() const;
    [[nodiscard]] double second_moment() const;
    [[nodiscard]] double draw(Rng& rng) const;
};

/// L(t) = b t + sigma W(t) + compound Poisson jumps.
struct LevySpec {
    double b = 0.0;
    double sigma = 0.0;
    std::vector<JumpComponent> jumps;
    bool zero_mean_enforced = false;

    /// Sets b = -sum rate E[J] and zero_mean_enforced.
    void enforce_zero_mean();
    [[nodiscard]] double mean_rate() const;  ///< b + sum rate E[J]
    void validate() const;
};

/// Seed offset of the independent jump stream and of the fundamental stream.
inline constexpr std::uint64_t kJumpStream = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kFundamentalStream = 0xC2B2AE3D27D4EB4FULL;

/// Number of Euler steps for horizon T; throws InvalidArgument on bad dt or more than 1e8 steps.
[[nodiscard]] std::size_t step_count(double dt, double T);

/**
 * @brief Euler-Maruyama path H(0..N), N = round(T/dt).
 * @throws Error StepTooLarge if dt * Lipschitz > 0.5
 */
[[nodiscard]] std::vector<double> simulate_factor(const CtModelSpec& spec, double h0, double dt, double T,
                                                  std::uint64_t seed);

/// L(0..N) on the Euler grid; diffusion from Rng(seed), jumps from Rng(seed + kJumpStream).
[[nodiscard]] std::vector<double> simulate_levy_process(const LevySpec& levy, double dt, double T,
                                                        std::uint64_t seed);

/// dH = f(H) dt + dL. With no jumps, b = 0 and levy.sigma = spec.sigma this equals simulate_factor bitwise.
[[nodiscard]] std::vector<double> simulate_levy_factor(const CtModelSpec& spec, const LevySpec& levy, double h0,
                                                       double dt, double T, std::uint64_t seed);

/// ln F(0..N) with F(0) = 0, drift g and volatility rho, stream seed + kFundamentalStream.
[[nodiscard]] std::vector<double> simulate_fundamental(const CtModelSpec& spec, double dt, double T,
                                                       std::uint64_t seed);

/// V(t) = exp(c t + F(t) + H(t)) on a grid with step dt.
[[nodiscard]] std::vector<double> wealth_from_factor(const std::vector<double>& H, const std::vector<double>& lnF,
                                                     double c, double dt);

struct PortfolioPath {
    std::vector<double> V;
    std::vector<double> pi;  ///< share used on [t_k, t_k+1); last entry repeats
    std::vector<double> consumption;
    bool terminated = false;  ///< wealth reached zero; path truncated
};

using PiRule = std::function<double(double t, double h)>;
/// Consumption rate as a function of (t, h, v).
using ConsumptionRule = std::function<double(double t, double h, double v)>;

/**
 * @brief Euler scheme for dV = V [pi dS/S + (1 - pi) r dt] - C dt.
 *
 * dS/S = dH + c dt + d ln F + (sigma^2 + rho^2)/2 dt from the factor and fundamental paths.
 *
 * @throws Error LengthMismatch, InvalidArgument (|pi| above pi_bound)
 */
[[nodiscard]] PortfolioPath integrate_portfolio(const std::vector<double>& H, const std::vector<double>& lnF,
                                                const CtModelSpec& spec, double dt, const PiRule& pi_rule,
                                                const ConsumptionRule* consumption, double v0,
                                                double pi_bound = 1e6);

/// 1/(2 gamma) + (g + c + f(h) - r) / (gamma (sigma^2 + rho^2)).
[[nodiscard]] double optimal_pi(double h, const CtModelSpec& spec, double gamma, double r);
[[nodiscard]] double optimal_pi(double h, const CtModelSpec& spec, double gamma);

/// Source coefficient kappa(h) multiplying (1 - gamma) theta in the HJB equations.
enum class KappaMode {
    FromHamiltonian,  ///< sup over pi of the drift: r + gamma (sigma^2 + rho^2) pi_*^2 / 2
    AsPrinted,        ///< r - pi_*^2 / (2 gamma (sigma^2 + rho^2))
};

[[nodiscard]] double hjb_kappa(double h, const CtModelSpec& spec, double gamma, KappaMode mode);

struct ThetaGrid {
    double h_min = -2.0;
    double h_max = 2.0;
    std::size_t n_h = 201;
    double horizon = 30.0;  ///< terminal time T (PDE only)
    std::size_t n_t = 600;  ///< time steps (PDE only)
};

/// Domain h_inf +- half_width_sd stationary standard deviations of the OU factor.
[[nodiscard]] ThetaGrid default_theta_grid(const CtModelSpec& spec, double half_width_sd = 6.0);

struct ThetaSolution {
    enum class Kind { TerminalPDE, ConsumptionODE };
    Kind kind = Kind::TerminalPDE;
    ThetaGrid grid;
    double gamma = 1.0;
    double discount_rate = 0.0;
    std::vector<double> h;
    std::vector<double> t;                   ///< PDE time levels, t[0] = 0, t.back() = horizon
    std::vector<std::vector<double>> theta;  ///< PDE: theta[time level][h]; ODE: single row
    double residual_norm = 0.0;
    std::size_t iterations = 0;

    /// ODE consumption C(v, h) = v theta(h)^{-1/gamma}, theta linearly interpolated.
    [[nodiscard]] double consumption(double v, double h_value) const;
};

enum class PdeScheme { CrankNicolson, Explicit };

/**
 * @brief Backward solve of theta_t + f theta_h + sigma^2/2 theta_hh + (1-gamma) kappa theta = 0, theta(T) = 1.
 *
 * Central differences inside, one-sided first derivative and theta_hh = 0 at the edges.
 * gamma = 1 returns theta = 1 exactly.
 *
 * @throws Error GridUnstable (explicit scheme outside its stability bound), NonPositiveTheta
 */
[[nodiscard]] ThetaSolution solve_terminal_pde(const CtModelSpec& spec, double gamma, const ThetaGrid& grid,
                                               KappaMode mode = KappaMode::FromHamiltonian,
                                               PdeScheme scheme = PdeScheme::CrankNicolson);

/**
 * @brief Damped Newton for 0 = -delta theta + f theta' + sigma^2/2 theta'' + (1-gamma) kappa theta + gamma theta^{1-1/gamma}.
 *
 * Starts from the constant root with kappa at h_inf.
 *
 * @throws Error NoConvergence, NonPositiveTheta, InvalidArgument (no positive constant root)
 */
[[nodiscard]] ThetaSolution solve_consumption_ode(const CtModelSpec& spec, double gamma, double discount_rate,
                                                  const ThetaGrid& grid, KappaMode mode = KappaMode::FromHamiltonian,
                                                  double tol = 1e-10, std::size_t max_iter = 200);

[[nodiscard]] std::string theta_to_csv(const ThetaSolution& s);
/// Inverse of theta_to_csv; gamma, discount_rate and grid spacing are not recovered beyond h and t.
[[nodiscard]] ThetaSolution parse_theta_csv(std::string_view content);

/// Grid path table exported as `t,H,F,V,pi` (pi empty when no portfolio was run).
struct CtPathTable {
    std::vector<double> t, H, F, V, pi;
};

[[nodiscard]] std::string ct_path_to_csv(const CtPathTable& p);
[[nodiscard]] CtPathTable parse_ct_path_csv(std::string_view content);

struct CtErgodicityReport {
    double lln_max_ratio = 0.0;  ///< max over paths of |H(t_max)| / t_max
    double ks_distance = 0.0;    ///< terminal laws from h0_a vs h0_b
    double mean_a = 0.0, var_a = 0.0;
    double mean_b = 0.0, var_b = 0.0;
    std::size_t n_paths = 0;
};

/**
 * @brief Two-start convergence check for the Brownian (levy = nullptr) or Levy-driven factor.
 *
 * Path i from h0_a uses stream seed + i, from h0_b stream seed + n_paths + i.
 */
[[nodiscard]] CtErgodicityReport ergodicity_check_ct(const CtModelSpec& spec, const LevySpec* levy, double h0_a,
                                                     double h0_b, double t_max, double dt, std::size_t n_paths,
                                                     std::uint64_t seed);

/// Two-sample Kolmogorov-Smirnov statistic.
[[nodiscard]] double ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace vlab
