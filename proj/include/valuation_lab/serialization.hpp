#pragma once

#include <json.hpp>

#include "valuation_lab/analysis.hpp"
#include "valuation_lab/continuous_time.hpp"
#include "valuation_lab/discrete_dynamics.hpp"
#include "valuation_lab/econostats.hpp"
#include "valuation_lab/valuation_models.hpp"

namespace vlab {

using Json = nlohmann::ordered_json;

[[nodiscard]] Json to_json(const TestReport& r);
[[nodiscard]] Json to_json(const std::vector<TestReport>& reports);

/// {model, coefficients, standard_errors, implied{...}, n, r_squared}
[[nodiscard]] Json fit_to_json(const Ar1Fit& fit);
[[nodiscard]] Json fit_to_json(const BubbleFit& fit);

/// {alpha, beta, c, sigma_eps, noise, g_source{kind, g}}; history and residual pool are not serialized.
[[nodiscard]] Json to_json(const DiscreteModelSpec& s);
/// Keys missing from j keep the values of `base`.
[[nodiscard]] DiscreteModelSpec discrete_spec_from_json(const Json& j, DiscreteModelSpec base = {});

[[nodiscard]] Json to_json(const CtModelSpec& s);
/// Accepts {beta_rev, h_inf, sigma, g, rho, c, r, r_steps}; only the LinearOU drift is expressible.
[[nodiscard]] CtModelSpec ct_spec_from_json(const Json& j, CtModelSpec base = {});

/// {b, sigma, zero_mean, jumps: [{rate, size: fixed|symmetric|normal, a, sd}]}
[[nodiscard]] LevySpec levy_spec_from_json(const Json& j);

[[nodiscard]] Json to_json(const GoldenCheck& c);

}  // namespace vlab
