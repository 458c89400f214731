#include "valuation_lab/continuous_time.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "valuation_lab/errors.hpp"
#include "valuation_lab/io.hpp"

namespace vlab {

namespace {

constexpr double kMaxSteps = 1e8;

// Thomas algorithm for sub/diag/super bands; rhs is overwritten with the solution.
void solve_tridiagonal(const std::vector<double>& sub, std::vector<double> diag, const std::vector<double>& sup,
                       std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double m = sub[i] / diag[i - 1];
        diag[i] -= m * sup[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
}

// Spatial operator L theta = f theta_h + sigma^2/2 theta_hh as tridiagonal bands.
// Edges: one-sided first derivative, theta_hh = 0.
struct Bands {
    std::vector<double> sub, diag, sup;
};

Bands spatial_operator(const std::vector<double>& h, const CtModelSpec& spec, double dh) {
    const std::size_t n = h.size();
    Bands b{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    const double diff = 0.5 * spec.sigma * spec.sigma / (dh * dh);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double f = spec.drift(h[i]);
        b.sub[i] = diff - f / (2.0 * dh);
        b.diag[i] = -2.0 * diff;
        b.sup[i] = diff + f / (2.0 * dh);
    }
    const double f0 = spec.drift(h.front());
    b.diag[0] = -f0 / dh;
    b.sup[0] = f0 / dh;
    const double fn = spec.drift(h.back());
    b.sub[n - 1] = -fn / dh;
    b.diag[n - 1] = fn / dh;
    return b;
}

std::vector<double> apply_bands(const Bands& b, const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = b.diag[i] * x[i];
        if (i > 0) v += b.sub[i] * x[i - 1];
        if (i + 1 < n) v += b.sup[i] * x[i + 1];
        y[i] = v;
    }
    return y;
}

std::vector<double> h_nodes(const ThetaGrid& grid) {
    if (grid.n_h < 3 || !(grid.h_max > grid.h_min)) throw Error(ErrorKind::InvalidArgument, "bad theta grid");
    std::vector<double> h(grid.n_h);
    const double dh = (grid.h_max - grid.h_min) / static_cast<double>(grid.n_h - 1);
    for (std::size_t i = 0; i < grid.n_h; ++i) h[i] = grid.h_min + dh * static_cast<double>(i);
    return h;
}

double std_normal(Rng& rng) { return rng.normal(); }

}  // namespace

double CtModelSpec::rate_at(double t) const {
    if (r_steps.empty()) return r;
    const auto k = static_cast<std::size_t>(std::max(0.0, std::floor(t)));
    return r_steps[std::min(k, r_steps.size() - 1)];
}

void CtModelSpec::validate() const {
    if (!(sigma >= 0.0) || !(rho >= 0.0)) throw Error(ErrorKind::InvalidArgument, "volatilities must be nonnegative");
    if (drift.kind == CtDrift::Kind::LinearOU && !(drift.beta_rev > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "LinearOU needs beta_rev > 0");
    }
    if (drift.kind == CtDrift::Kind::Custom && !drift.custom) {
        throw Error(ErrorKind::InvalidArgument, "custom drift function missing");
    }
}

double JumpComponent::mean() const {
    switch (size) {
        case Size::Fixed: return a;
        case Size::Symmetric: return 0.0;
        case Size::Normal: return a;
    }
    return 0.0;
}

double JumpComponent::second_moment() const {
    switch (size) {
        case Size::Fixed:
        case Size::Symmetric: return a * a;
        case Size::Normal: return a * a + sd * sd;
    }
    return 0.0;
}

double JumpComponent::draw(Rng& rng) const {
    switch (size) {
        case Size::Fixed: return a;
        case Size::Symmetric: return rng.uniform() < 0.5 ? -a : a;
        case Size::Normal: return a + sd * rng.normal();
    }
    return 0.0;
}

void LevySpec::enforce_zero_mean() {
    double m = 0.0;
    for (const auto& j : jumps) m += j.rate * j.mean();
    b = -m;
    zero_mean_enforced = true;
}

double LevySpec::mean_rate() const {
    double m = b;
    for (const auto& j : jumps) m += j.rate * j.mean();
    return m;
}

void LevySpec::validate() const {
    if (!(sigma >= 0.0)) throw Error(ErrorKind::InvalidArgument, "Levy sigma must be nonnegative");
    for (const auto& j : jumps) {
        if (!(j.rate >= 0.0) || !(j.sd >= 0.0)) throw Error(ErrorKind::InvalidArgument, "bad jump component");
    }
    if (zero_mean_enforced && std::fabs(mean_rate()) > 1e-12 * (1.0 + std::fabs(b))) {
        throw Error(ErrorKind::InvalidArgument, "zero-mean Levy spec has nonzero mean");
    }
}

std::size_t step_count(double dt, double T) {
    if (!(dt > 0.0) || !(T > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt and T must be positive");
    const double n = std::round(T / dt);
    if (n > kMaxSteps) throw Error(ErrorKind::InvalidArgument, "more than 1e8 time steps");
    return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

namespace {

void check_step(const CtModelSpec& spec, double dt) {
    spec.validate();
    if (dt * spec.drift.lipschitz_bound() > 0.5) {
        throw Error(ErrorKind::StepTooLarge, "dt times the drift Lipschitz bound exceeds 0.5");
    }
}

// Levy increments for steps [k dt, (k+1) dt), jumps via exponential clocks per component.
class LevyStepper {
public:
    LevyStepper(const LevySpec& levy, double dt, std::uint64_t seed)
        : levy_(levy), dt_(dt), sqdt_(std::sqrt(dt)), diffusion_(seed), jumps_(seed + kJumpStream) {
        next_.resize(levy.jumps.size());
        for (std::size_t j = 0; j < levy.jumps.size(); ++j) {
            const double rate = levy.jumps[j].rate;
            next_[j] = rate > 0.0 ? jumps_.exponential(rate) : std::numeric_limits<double>::infinity();
        }
    }

    double step(std::size_t k) {
        double inc = levy_.b * dt_ + levy_.sigma * sqdt_ * std_normal(diffusion_);
        const double t_end = static_cast<double>(k + 1) * dt_;
        for (std::size_t j = 0; j < next_.size(); ++j) {
            while (next_[j] <= t_end) {
                inc += levy_.jumps[j].draw(jumps_);
                next_[j] += jumps_.exponential(levy_.jumps[j].rate);
            }
        }
        return inc;
    }

private:
    const LevySpec& levy_;
    double dt_;
    double sqdt_;
    Rng diffusion_;
    Rng jumps_;
    std::vector<double> next_;
};

}  // namespace

std::vector<double> simulate_factor(const CtModelSpec& spec, double h0, double dt, double T, std::uint64_t seed) {
    check_step(spec, dt);
    const std::size_t n = step_count(dt, T);
    Rng rng(seed);
    const double sq = spec.sigma * std::sqrt(dt);
    std::vector<double> H(n + 1);
    H[0] = h0;
    for (std::size_t k = 0; k < n; ++k) {
        const double drift = H[k] + spec.drift(H[k]) * dt;
        H[k + 1] = drift + sq * std_normal(rng);
    }
    return H;
}

std::vector<double> simulate_levy_process(const LevySpec& levy, double dt, double T, std::uint64_t seed) {
    levy.validate();
    const std::size_t n = step_count(dt, T);
    LevyStepper stepper(levy, dt, seed);
    std::vector<double> L(n + 1);
    L[0] = 0.0;
    for (std::size_t k = 0; k < n; ++k) L[k + 1] = L[k] + stepper.step(k);
    return L;
}

std::vector<double> simulate_levy_factor(const CtModelSpec& spec, const LevySpec& levy, double h0, double dt,
                                         double T, std::uint64_t seed) {
    check_step(spec, dt);
    levy.validate();
    const std::size_t n = step_count(dt, T);
    LevyStepper stepper(levy, dt, seed);
    std::vector<double> H(n + 1);
    H[0] = h0;
    for (std::size_t k = 0; k < n; ++k) {
        const double drift = H[k] + spec.drift(H[k]) * dt;
        H[k + 1] = drift + stepper.step(k);
    }
    return H;
}

std::vector<double> simulate_fundamental(const CtModelSpec& spec, double dt, double T, std::uint64_t seed) {
    spec.validate();
    const std::size_t n = step_count(dt, T);
    Rng rng(seed + kFundamentalStream);
    const double sq = spec.rho * std::sqrt(dt);
    std::vector<double> F(n + 1);
    F[0] = 0.0;
    for (std::size_t k = 0; k < n; ++k) F[k + 1] = F[k] + spec.g * dt + sq * rng.normal();
    return F;
}

std::vector<double> wealth_from_factor(const std::vector<double>& H, const std::vector<double>& lnF, double c,
                                       double dt) {
    if (H.size() != lnF.size()) throw Error(ErrorKind::LengthMismatch, "factor and fundamental grids differ");
    std::vector<double> V(H.size());
    for (std::size_t k = 0; k < H.size(); ++k) V[k] = std::exp(c * dt * static_cast<double>(k) + lnF[k] + H[k]);
    return V;
}

PortfolioPath integrate_portfolio(const std::vector<double>& H, const std::vector<double>& lnF,
                                  const CtModelSpec& spec, double dt, const PiRule& pi_rule,
                                  const ConsumptionRule* consumption, double v0, double pi_bound) {
    if (H.size() != lnF.size() || H.empty()) throw Error(ErrorKind::LengthMismatch, "factor and fundamental grids differ");
    const double half_var = 0.5 * spec.total_variance();
    PortfolioPath p;
    p.V.reserve(H.size());
    p.pi.reserve(H.size());
    p.V.push_back(v0);
    for (std::size_t k = 0; k + 1 < H.size(); ++k) {
        const double t = dt * static_cast<double>(k);
        const double pi = pi_rule(t, H[k]);
        if (!(std::fabs(pi) <= pi_bound)) throw Error(ErrorKind::InvalidArgument, "portfolio share exceeds its bound");
        const double stock = (H[k + 1] - H[k]) + spec.c * dt + (lnF[k + 1] - lnF[k]) + half_var * dt;
        const double r = spec.rate_at(t);
        const double v = p.V.back();
        double next = v * (1.0 + pi * stock + (1.0 - pi) * r * dt);
        if (consumption) {
            const double rate = (*consumption)(t, H[k], v);
            p.consumption.push_back(rate);
            next -= rate * dt;
        }
        p.pi.push_back(pi);
        p.V.push_back(next);
        if (next <= 0.0) {
            p.terminated = true;
            break;
        }
    }
    p.pi.push_back(p.pi.empty() ? pi_rule(0.0, H[0]) : p.pi.back());
    return p;
}

double optimal_pi(double h, const CtModelSpec& spec, double gamma, double r) {
    if (!(gamma > 0.0)) throw Error(ErrorKind::InvalidArgument, "gamma must be positive");
    const double var = spec.total_variance();
    if (!(var > 0.0)) throw Error(ErrorKind::InvalidArgument, "sigma^2 + rho^2 must be positive");
    return 1.0 / (2.0 * gamma) + (spec.g + spec.c + spec.drift(h) - r) / (gamma * var);
}

double optimal_pi(double h, const CtModelSpec& spec, double gamma) { return optimal_pi(h, spec, gamma, spec.r); }

double hjb_kappa(double h, const CtModelSpec& spec, double gamma, KappaMode mode) {
    const double pi = optimal_pi(h, spec, gamma);
    const double var = spec.total_variance();
    if (mode == KappaMode::FromHamiltonian) return spec.r + 0.5 * gamma * var * pi * pi;
    return spec.r - pi * pi / (2.0 * gamma * var);
}

ThetaGrid default_theta_grid(const CtModelSpec& spec, double half_width_sd) {
    ThetaGrid g;
    double center = spec.drift.h_inf;
    double sd = 1.0;
    if (spec.drift.kind == CtDrift::Kind::LinearOU) sd = spec.sigma / std::sqrt(2.0 * spec.drift.beta_rev);
    if (!(sd > 0.0)) sd = 1.0;
    g.h_min = center - half_width_sd * sd;
    g.h_max = center + half_width_sd * sd;
    return g;
}

double ThetaSolution::consumption(double v, double h_value) const {
    const auto& row = theta.back();
    double th;
    if (h_value <= h.front()) {
        th = row.front();
    } else if (h_value >= h.back()) {
        th = row.back();
    } else {
        const double dh = h[1] - h[0];
        const auto i = std::min(h.size() - 2, static_cast<std::size_t>((h_value - h.front()) / dh));
        const double w = (h_value - h[i]) / dh;
        th = (1.0 - w) * row[i] + w * row[i + 1];
    }
    return v * std::pow(th, -1.0 / gamma);
}

ThetaSolution solve_terminal_pde(const CtModelSpec& spec, double gamma, const ThetaGrid& grid, KappaMode mode,
                                 PdeScheme scheme) {
    spec.validate();
    if (!(gamma > 0.0)) throw Error(ErrorKind::InvalidArgument, "gamma must be positive");
    if (grid.n_t < 1 || !(grid.horizon > 0.0)) throw Error(ErrorKind::InvalidArgument, "bad PDE time grid");
    ThetaSolution s;
    s.kind = ThetaSolution::Kind::TerminalPDE;
    s.grid = grid;
    s.gamma = gamma;
    s.h = h_nodes(grid);
    const std::size_t n = s.h.size();
    const std::size_t nt = grid.n_t;
    const double dtau = grid.horizon / static_cast<double>(nt);
    s.t.resize(nt + 1);
    for (std::size_t k = 0; k <= nt; ++k) s.t[k] = dtau * static_cast<double>(k);
    s.theta.assign(nt + 1, std::vector<double>(n, 1.0));
    if (gamma == 1.0) return s;

    const double dh = s.h[1] - s.h[0];
    Bands A = spatial_operator(s.h, spec, dh);
    for (std::size_t i = 0; i < n; ++i) A.diag[i] += (1.0 - gamma) * hjb_kappa(s.h[i], spec, gamma, mode);

    if (scheme == PdeScheme::Explicit) {
        double fmax = 0.0;
        for (double x : s.h) fmax = std::max(fmax, std::fabs(spec.drift(x)));
        const double diff = spec.sigma * spec.sigma / (dh * dh);
        if (dtau * diff > 0.5 || dtau * fmax / dh > 1.0) {
            throw Error(ErrorKind::GridUnstable, "explicit step violates dt*sigma^2/dh^2 <= 1/2 or dt*|f|/dh <= 1");
        }
    }

    // theta[k] holds time t_k; march backward from theta[nt] = 1.
    std::vector<double> sub(n), diag(n), sup(n);
    for (std::size_t i = 0; i < n; ++i) {
        sub[i] = -0.5 * dtau * A.sub[i];
        diag[i] = 1.0 - 0.5 * dtau * A.diag[i];
        sup[i] = -0.5 * dtau * A.sup[i];
    }
    double residual = 0.0;
    for (std::size_t k = nt; k-- > 0;) {
        const auto& cur = s.theta[k + 1];
        const auto Lcur = apply_bands(A, cur);
        std::vector<double> next(n);
        if (scheme == PdeScheme::Explicit) {
            for (std::size_t i = 0; i < n; ++i) next[i] = cur[i] + dtau * Lcur[i];
        } else {
            for (std::size_t i = 0; i < n; ++i) next[i] = cur[i] + 0.5 * dtau * Lcur[i];
            solve_tridiagonal(sub, diag, sup, next);
            const auto Lnext = apply_bands(A, next);
            for (std::size_t i = 1; i + 1 < n; ++i) {
                const double r = (next[i] - cur[i]) / dtau - 0.5 * (Lcur[i] + Lnext[i]);
                residual = std::max(residual, std::fabs(r) / std::max(1.0, std::fabs(next[i])));
            }
        }
        for (double v : next) {
            if (!(v > 0.0)) throw Error(ErrorKind::NonPositiveTheta, "theta became nonpositive");
        }
        s.theta[k] = std::move(next);
    }
    s.residual_norm = residual;
    s.iterations = nt;
    return s;
}

ThetaSolution solve_consumption_ode(const CtModelSpec& spec, double gamma, double discount_rate,
                                    const ThetaGrid& grid, KappaMode mode, double tol, std::size_t max_iter) {
    spec.validate();
    if (!(gamma > 0.0)) throw Error(ErrorKind::InvalidArgument, "gamma must be positive");
    if (!(discount_rate > 0.0)) throw Error(ErrorKind::InvalidArgument, "discount rate must be positive");
    ThetaSolution s;
    s.kind = ThetaSolution::Kind::ConsumptionODE;
    s.grid = grid;
    s.gamma = gamma;
    s.discount_rate = discount_rate;
    s.h = h_nodes(grid);
    const std::size_t n = s.h.size();
    const double dh = s.h[1] - s.h[0];

    const Bands L = spatial_operator(s.h, spec, dh);
    std::vector<double> lin(n);  // -delta + (1-gamma) kappa
    for (std::size_t i = 0; i < n; ++i) {
        lin[i] = -discount_rate + (1.0 - gamma) * hjb_kappa(s.h[i], spec, gamma, mode);
    }
    const double p = 1.0 - 1.0 / gamma;

    const double denom0 = discount_rate - (1.0 - gamma) * hjb_kappa(spec.drift.h_inf, spec, gamma, mode);
    if (!(denom0 > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "discount rate too small for a positive constant solution");
    }
    std::vector<double> theta(n, std::pow(gamma / denom0, gamma));

    auto residual_of = [&](const std::vector<double>& th) {
        auto r = apply_bands(L, th);
        for (std::size_t i = 0; i < n; ++i) r[i] += lin[i] * th[i] + gamma * std::pow(th[i], p);
        return r;
    };
    auto scaled_norm = [&](const std::vector<double>& r, const std::vector<double>& th, bool interior) {
        double m = 0.0;
        const std::size_t lo = interior ? 1 : 0;
        const std::size_t hi = interior ? n - 1 : n;
        for (std::size_t i = lo; i < hi; ++i) m = std::max(m, std::fabs(r[i]) / std::max(1.0, std::fabs(th[i])));
        return m;
    };

    auto F = residual_of(theta);
    double norm = scaled_norm(F, theta, false);
    std::size_t it = 0;
    while (norm > tol) {
        if (it++ >= max_iter) throw Error(ErrorKind::NoConvergence, "Newton iteration budget exhausted");
        std::vector<double> sub = L.sub;
        std::vector<double> diag = L.diag;
        std::vector<double> sup = L.sup;
        for (std::size_t i = 0; i < n; ++i) diag[i] += lin[i] + gamma * p * std::pow(theta[i], p - 1.0);
        std::vector<double> step(n);
        for (std::size_t i = 0; i < n; ++i) step[i] = -F[i];
        solve_tridiagonal(sub, diag, sup, step);

        double lambda = 1.0;
        bool accepted = false;
        for (int k = 0; k < 40; ++k) {
            std::vector<double> trial(n);
            bool positive = true;
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] = theta[i] + lambda * step[i];
                positive = positive && trial[i] > 0.0;
            }
            if (positive) {
                auto Ft = residual_of(trial);
                const double nt = scaled_norm(Ft, trial, false);
                if (nt < norm || nt <= tol) {
                    theta = std::move(trial);
                    F = std::move(Ft);
                    norm = nt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if (!accepted) throw Error(ErrorKind::NoConvergence, "damped Newton step failed to reduce the residual");
    }
    for (double v : theta) {
        if (!(v > 0.0)) throw Error(ErrorKind::NonPositiveTheta, "theta became nonpositive");
    }
    s.residual_norm = scaled_norm(F, theta, true);
    s.iterations = it;
    s.theta.push_back(std::move(theta));
    return s;
}

std::string theta_to_csv(const ThetaSolution& s) {
    std::ostringstream out;
    if (s.kind == ThetaSolution::Kind::ConsumptionODE) {
        out << "h,theta\n";
        for (std::size_t i = 0; i < s.h.size(); ++i) out << io::fmt(s.h[i]) << ',' << io::fmt(s.theta[0][i]) << '\n';
        return out.str();
    }
    out << "t,h,theta\n";
    for (std::size_t k = 0; k < s.t.size(); ++k) {
        for (std::size_t i = 0; i < s.h.size(); ++i) {
            out << io::fmt(s.t[k]) << ',' << io::fmt(s.h[i]) << ',' << io::fmt(s.theta[k][i]) << '\n';
        }
    }
    return out.str();
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw Error(ErrorKind::TooFewObservations, "KS needs two nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

CtErgodicityReport ergodicity_check_ct(const CtModelSpec& spec, const LevySpec* levy, double h0_a, double h0_b,
                                       double t_max, double dt, std::size_t n_paths, std::uint64_t seed) {
    check_step(spec, dt);
    if (levy) levy->validate();
    if (n_paths < 2) throw Error(ErrorKind::InvalidArgument, "need at least two paths");
    std::vector<double> end_a(n_paths), end_b(n_paths);
    parallel_for(2 * n_paths, [&](std::size_t k) {
        const bool first = k < n_paths;
        const double h0 = first ? h0_a : h0_b;
        const auto H = levy ? simulate_levy_factor(spec, *levy, h0, dt, t_max, seed + k)
                            : simulate_factor(spec, h0, dt, t_max, seed + k);
        (first ? end_a[k] : end_b[k - n_paths]) = H.back();
    });
    CtErgodicityReport rep;
    rep.n_paths = n_paths;
    auto moments = [](const std::vector<double>& x, double& m, double& v) {
        m = 0.0;
        for (double e : x) m += e;
        m /= static_cast<double>(x.size());
        v = 0.0;
        for (double e : x) v += (e - m) * (e - m);
        v /= static_cast<double>(x.size() - 1);
    };
    moments(end_a, rep.mean_a, rep.var_a);
    moments(end_b, rep.mean_b, rep.var_b);
    for (double e : end_a) rep.lln_max_ratio = std::max(rep.lln_max_ratio, std::fabs(e) / t_max);
    for (double e : end_b) rep.lln_max_ratio = std::max(rep.lln_max_ratio, std::fabs(e) / t_max);
    rep.ks_distance = ks_two_sample(end_a, end_b);
    return rep;
}

}  // namespace vlab

namespace vlab {

ThetaSolution parse_theta_csv(std::string_view content) {
    const auto ls = io::lines(content);
    if (ls.empty()) throw Error(ErrorKind::MalformedRow, "empty theta CSV");
    ThetaSolution s;
    const bool pde = ls[0] == "t,h,theta";
    if (!pde && ls[0] != "h,theta") throw Error(ErrorKind::MalformedRow, "theta CSV header mismatch");
    s.kind = pde ? ThetaSolution::Kind::TerminalPDE : ThetaSolution::Kind::ConsumptionODE;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto cells = io::split_csv_line(ls[i]);
        double v[3];
        const std::size_t width = pde ? 3 : 2;
        bool ok = cells.size() == width;
        for (std::size_t j = 0; ok && j < width; ++j) ok = io::parse_double(cells[j], v[j]);
        if (!ok) throw Error(ErrorKind::MalformedRow, "bad theta row " + std::to_string(i + 1));
        const double t = pde ? v[0] : 0.0;
        const double h = pde ? v[1] : v[0];
        const double th = pde ? v[2] : v[1];
        if (s.theta.empty() || (pde && t != s.t.back())) {
            if (pde) s.t.push_back(t);
            s.theta.emplace_back();
        }
        if (s.theta.size() == 1) s.h.push_back(h);
        s.theta.back().push_back(th);
    }
    for (const auto& row : s.theta) {
        if (row.size() != s.h.size()) throw Error(ErrorKind::MalformedRow, "ragged theta grid");
    }
    s.grid.n_h = s.h.size();
    if (!s.h.empty()) {
        s.grid.h_min = s.h.front();
        s.grid.h_max = s.h.back();
    }
    if (pde && !s.t.empty()) {
        s.grid.horizon = s.t.back();
        s.grid.n_t = s.t.size() - 1;
    }
    return s;
}

std::string ct_path_to_csv(const CtPathTable& p) {
    const std::size_t n = p.t.size();
    if (p.H.size() != n || p.F.size() != n || p.V.size() != n || (!p.pi.empty() && p.pi.size() != n)) {
        throw Error(ErrorKind::LengthMismatch, "path columns differ in length");
    }
    std::ostringstream out;
    out << "t,H,F,V,pi\n";
    for (std::size_t k = 0; k < n; ++k) {
        out << io::fmt(p.t[k]) << ',' << io::fmt(p.H[k]) << ',' << io::fmt(p.F[k]) << ',' << io::fmt(p.V[k]) << ','
            << (p.pi.empty() ? std::string() : io::fmt(p.pi[k])) << '\n';
    }
    return out.str();
}

CtPathTable parse_ct_path_csv(std::string_view content) {
    const auto ls = io::lines(content);
    if (ls.empty() || ls[0] != "t,H,F,V,pi") throw Error(ErrorKind::MalformedRow, "path CSV header mismatch");
    CtPathTable p;
    bool any_pi = false;
    std::vector<double> pis;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto cells = io::split_csv_line(ls[i]);
        double v[4];
        bool ok = cells.size() == 5;
        for (std::size_t j = 0; ok && j < 4; ++j) ok = io::parse_double(cells[j], v[j]);
        double pi = std::numeric_limits<double>::quiet_NaN();
        if (ok && !cells[4].empty()) {
            ok = io::parse_double(cells[4], pi);
            any_pi = true;
        }
        if (!ok) throw Error(ErrorKind::MalformedRow, "bad path row " + std::to_string(i + 1));
        p.t.push_back(v[0]);
        p.H.push_back(v[1]);
        p.F.push_back(v[2]);
        p.V.push_back(v[3]);
        pis.push_back(pi);
    }
    if (any_pi) p.pi = std::move(pis);
    return p;
}

}  // namespace vlab
