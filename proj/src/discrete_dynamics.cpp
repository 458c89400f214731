#include "valuation_lab/discrete_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "valuation_lab/errors.hpp"
#include "valuation_lab/io.hpp"

namespace vlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

void DiscreteModelSpec::validate() const {
    if (!(beta > 0.0 && beta < 1.0)) throw Error(ErrorKind::InvalidArgument, "beta must lie in (0, 1)");
    if (!(sigma_eps >= 0.0)) throw Error(ErrorKind::InvalidArgument, "sigma_eps must be nonnegative");
    if (noise == NoiseKind::Empirical && residual_pool.empty()) {
        throw Error(ErrorKind::InvalidArgument, "empirical noise needs a residual pool");
    }
    if (g_source.kind == GrowthSource::Kind::HistoricalBlocks && g_source.history.empty()) {
        throw Error(ErrorKind::InvalidArgument, "historical growth source is empty");
    }
}

double draw_noise(const DiscreteModelSpec& spec, Rng& rng) {
    if (spec.noise == NoiseKind::Empirical) return spec.residual_pool[rng.index(spec.residual_pool.size())];
    return spec.sigma_eps * rng.normal();
}

std::vector<double> simulate_ar1(const DiscreteModelSpec& spec, double b0, std::size_t T, Rng& rng) {
    std::vector<double> B(T + 1);
    B[0] = b0;
    for (std::size_t t = 1; t <= T; ++t) B[t] = spec.alpha + spec.beta * B[t - 1] + draw_noise(spec, rng);
    return B;
}

std::vector<double> simulate_ar1(const DiscreteModelSpec& spec, double b0, std::size_t T, std::uint64_t seed) {
    if (T < 1) throw Error(ErrorKind::InvalidArgument, "simulate_ar1 needs T >= 1");
    spec.validate();
    Rng rng(seed);
    return simulate_ar1(spec, b0, T, rng);
}

WithdrawalProcess WithdrawalProcess::constant_fraction(double w) {
    if (!(w > 0.0 && w < 1.0)) throw Error(ErrorKind::InvalidArgument, "constant fraction must lie in (0, 1)");
    return {Kind::ConstantFraction, w, {}};
}

SimulatedPath path_from_components(std::span<const double> B, std::span<const double> G, double c,
                                   const WithdrawalProcess& withdrawal) {
    if (B.size() != G.size() + 1) throw Error(ErrorKind::LengthMismatch, "B must have one more entry than G");
    if (withdrawal.kind == WithdrawalProcess::Kind::Custom && withdrawal.series.size() != G.size()) {
        throw Error(ErrorKind::LengthMismatch, "custom withdrawal series must match the horizon");
    }
    const std::size_t T = G.size();
    SimulatedPath p;
    p.B.assign(B.begin(), B.end());
    p.Delta.assign(T + 1, kNaN);
    p.G.assign(T + 1, kNaN);
    p.R.assign(T + 1, kNaN);
    p.V.assign(T + 1, kNaN);
    p.V[0] = 1.0;
    for (std::size_t t = 1; t <= T; ++t) {
        p.Delta[t] = B[t] - B[t - 1] + c;
        p.G[t] = G[t - 1];
        p.R[t] = p.Delta[t] + p.G[t];
        const double grown = p.V[t - 1] * std::exp(p.R[t]);
        double fraction = 0.0;
        switch (withdrawal.kind) {
            case WithdrawalProcess::Kind::None:
                p.V[t] = grown;
                continue;
            case WithdrawalProcess::Kind::ConstantReal:
                p.V[t] = grown - withdrawal.w * p.V[0];
                break;
            case WithdrawalProcess::Kind::ConstantFraction:
                fraction = withdrawal.w;
                p.V[t] = grown * (1.0 - fraction);
                break;
            case WithdrawalProcess::Kind::EarningsLinked:
                fraction = 1.0 - std::exp(withdrawal.w - p.G[t]);
                p.V[t] = grown * std::exp(withdrawal.w - p.G[t]);
                break;
            case WithdrawalProcess::Kind::Custom:
                fraction = withdrawal.series[t - 1];
                p.V[t] = grown * (1.0 - fraction);
                break;
        }
        if (withdrawal.kind != WithdrawalProcess::Kind::ConstantReal && !(fraction > 0.0 && fraction < 1.0)) {
            p.withdrawal_out_of_range = true;
        }
        if (p.V[t] <= 0.0) {
            p.ruined_at = t;
            for (auto* v : {&p.B, &p.Delta, &p.G, &p.R, &p.V}) v->resize(t + 1);
            break;
        }
    }
    return p;
}

std::string path_to_csv(const SimulatedPath& path) {
    std::ostringstream out;
    out << "t,B,Delta,G,R,V\n";
    for (std::size_t t = 0; t < path.B.size(); ++t) {
        out << t << ',' << io::fmt(path.B[t]) << ',' << io::fmt(path.Delta[t]) << ',' << io::fmt(path.G[t]) << ','
            << io::fmt(path.R[t]) << ',' << io::fmt(path.V[t]) << '\n';
    }
    return out.str();
}

SimulatedPath parse_path_csv(std::string_view content) {
    const auto ls = io::lines(content);
    if (ls.empty() || ls[0] != "t,B,Delta,G,R,V") throw Error(ErrorKind::MalformedRow, "path CSV header mismatch");
    SimulatedPath p;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto cells = io::split_csv_line(ls[i]);
        int t = 0;
        if (cells.size() != 6 || !io::parse_int(cells[0], t) || t != static_cast<int>(i - 1)) {
            throw Error(ErrorKind::MalformedRow, "bad path row " + std::to_string(i + 1));
        }
        std::vector<double>* cols[] = {&p.B, &p.Delta, &p.G, &p.R, &p.V};
        for (std::size_t j = 0; j < 5; ++j) {
            double v = kNaN;
            if (!cells[j + 1].empty() && !io::parse_double(cells[j + 1], v)) {
                throw Error(ErrorKind::MalformedRow, "bad path row " + std::to_string(i + 1));
            }
            cols[j]->push_back(v);
        }
    }
    return p;
}

LlnReport check_lln(const DiscreteModelSpec& spec, double b0, std::size_t T, double g, double tol,
                    std::uint64_t seed) {
    const auto B = simulate_ar1(spec, b0, T, seed);
    double bsum = 0.0;
    for (std::size_t t = 1; t <= T; ++t) bsum += B[t];
    LlnReport rep;
    rep.c = spec.c;
    rep.h = spec.h();
    rep.g = g;
    const double Tn = static_cast<double>(T);
    rep.delta_avg = (B[T] - B[0]) / Tn + spec.c;
    rep.b_avg = bsum / Tn;
    rep.r_avg = rep.delta_avg + g;
    rep.delta_pass = std::fabs(rep.delta_avg - spec.c) < tol;
    rep.b_pass = std::fabs(rep.b_avg - rep.h) < tol;
    rep.r_pass = std::fabs(rep.r_avg - (spec.c + g)) < tol;
    return rep;
}

StationaryMoments stationary_moments(const DiscreteModelSpec& spec) {
    // The moment formulas stay valid for i.i.d. innovations (beta = 0).
    if (!(spec.beta >= 0.0 && spec.beta < 1.0) || !(spec.sigma_eps >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "stationary moments need 0 <= beta < 1 and sigma_eps >= 0");
    }
    return {spec.h(), spec.sigma_eps * spec.sigma_eps / (1.0 - spec.beta * spec.beta)};
}

std::vector<double> geometric_ergodicity_estimate(const DiscreteModelSpec& spec, double b0_a, double b0_b,
                                                  std::size_t t_max, std::size_t n_paths, std::uint64_t seed,
                                                  std::size_t n_bins) {
    spec.validate();
    if (n_paths < 1 || n_bins < 1) throw Error(ErrorKind::InvalidArgument, "need n_paths >= 1 and n_bins >= 1");
    std::vector<double> tv(t_max + 1);

    if (spec.sigma_eps == 0.0 && spec.noise == NoiseKind::Gaussian) {
        double a = b0_a;
        double b = b0_b;
        for (std::size_t t = 0; t <= t_max; ++t) {
            tv[t] = a == b ? 0.0 : 1.0;
            a = spec.alpha + spec.beta * a;
            b = spec.alpha + spec.beta * b;
        }
        return tv;
    }

    const double sd = std::sqrt(stationary_moments(spec).variance);
    const double lo = std::min({spec.h(), b0_a, b0_b}) - 5.0 * sd;
    const double hi = std::max({spec.h(), b0_a, b0_b}) + 5.0 * sd;
    const double width = (hi - lo) / static_cast<double>(n_bins);
    auto bin_of = [&](double x) -> std::size_t {
        if (x < lo) return 0;
        if (x >= hi) return n_bins + 1;
        return 1 + std::min(n_bins - 1, static_cast<std::size_t>((x - lo) / width));
    };

    // paths[i][t] for both starts, generated per stream so the result is scheduling-independent
    std::vector<std::vector<std::uint16_t>> bins_a(n_paths), bins_b(n_paths);
    parallel_for(2 * n_paths, [&](std::size_t k) {
        const bool first = k < n_paths;
        const std::size_t i = first ? k : k - n_paths;
        Rng rng(seed + k);
        auto& out = first ? bins_a[i] : bins_b[i];
        out.resize(t_max + 1);
        double x = first ? b0_a : b0_b;
        for (std::size_t t = 0; t <= t_max; ++t) {
            out[t] = static_cast<std::uint16_t>(bin_of(x));
            x = spec.alpha + spec.beta * x + draw_noise(spec, rng);
        }
    });

    std::vector<double> ca(n_bins + 2), cb(n_bins + 2);
    const double inv = 1.0 / static_cast<double>(n_paths);
    for (std::size_t t = 0; t <= t_max; ++t) {
        std::fill(ca.begin(), ca.end(), 0.0);
        std::fill(cb.begin(), cb.end(), 0.0);
        for (std::size_t i = 0; i < n_paths; ++i) {
            ca[bins_a[i][t]] += inv;
            cb[bins_b[i][t]] += inv;
        }
        double d = 0.0;
        for (std::size_t j = 0; j < ca.size(); ++j) d += std::fabs(ca[j] - cb[j]);
        tv[t] = 0.5 * d;
    }
    return tv;
}

SustainabilityBounds sustainability_bounds(double c, double g) {
    return {-std::expm1(-(c + g)), c + g};
}

double mean_withdrawal(double w, double mean_exp_neg_g) { return 1.0 - std::exp(w) * mean_exp_neg_g; }

EarningsLinkedStats earnings_linked_stats(double w, std::span<const double> G_hist) {
    if (G_hist.empty()) throw Error(ErrorKind::TooFewObservations, "empty growth history");
    EarningsLinkedStats s;
    s.W.resize(G_hist.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < G_hist.size(); ++i) {
        s.W[i] = -std::expm1(w - G_hist[i]);
        acc += std::exp(-G_hist[i]);
    }
    s.mean_exp_neg_g = acc / static_cast<double>(G_hist.size());
    s.mean_withdrawal = mean_withdrawal(w, s.mean_exp_neg_g);
    return s;
}

}  // namespace vlab
