#pragma once

// The mixing law rho(tau) = (1/K) H^{m,0}_{p,m}[tau | (a_i,alpha_i); (b_j,beta_j)]
// on (0, inf): pointwise density, exact Gamma-ratio moments, Laplace
// transform, and inverse-CDF sampling from a tabulated grid.
//
// The degenerate white-noise family has a unit point mass instead of a
// density; it is represented by a constant sampler and closed-form moments,
// and density evaluation is refused.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "gwright/errors.hpp"
#include "gwright/foxh.hpp"
#include "gwright/quadrature.hpp"
#include "gwright/rng.hpp"
#include "gwright/wright.hpp"

namespace gwright {

namespace fhdam_detail {

// Monotone piecewise-cubic interpolant (Fritsch-Carlson limited slopes).
// Used for the quantile function: x = cdf values, y = log nodes.
struct MonotoneCubic {
    std::vector<double> x, y, slope;

    void build(const std::vector<double>& xs, const std::vector<double>& ys) {
        const size_t n = xs.size();
        x = xs;
        y = ys;
        slope.assign(n, 0.0);
        if (n < 2) return;
        std::vector<double> d(n - 1);
        for (size_t i = 0; i + 1 < n; ++i) {
            const double h = xs[i + 1] - xs[i];
            d[i] = h > 0.0 ? (ys[i + 1] - ys[i]) / h : 0.0;
        }
        slope[0] = d[0];
        slope[n - 1] = d[n - 2];
        for (size_t i = 1; i + 1 < n; ++i) {
            if (d[i - 1] * d[i] <= 0.0) {
                slope[i] = 0.0;
            } else {
                // Harmonic mean weighted by interval lengths keeps the
                // interpolant monotone on each subinterval.
                const double h0 = xs[i] - xs[i - 1], h1 = xs[i + 1] - xs[i];
                const double w0 = 2.0 * h1 + h0, w1 = h1 + 2.0 * h0;
                slope[i] = (w0 + w1) / (w0 / d[i - 1] + w1 / d[i]);
            }
        }
        // Endpoint slope limiting.
        if (d[0] != 0.0 && std::fabs(slope[0]) > 3.0 * std::fabs(d[0])) slope[0] = 3.0 * d[0];
        if (d[n - 2] != 0.0 && std::fabs(slope[n - 1]) > 3.0 * std::fabs(d[n - 2])) {
            slope[n - 1] = 3.0 * d[n - 2];
        }
    }

    double operator()(double xv) const {
        if (x.empty()) throw state_error("MonotoneCubic: empty table");
        if (xv <= x.front()) return y.front();
        if (xv >= x.back()) return y.back();
        const auto it = std::upper_bound(x.begin(), x.end(), xv);
        const size_t i = static_cast<size_t>(it - x.begin()) - 1;
        const double h = x[i + 1] - x[i];
        if (h <= 0.0) return y[i];
        const double t = (xv - x[i]) / h;
        const double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        const double h10 = t * (1.0 - t) * (1.0 - t);
        const double h01 = t * t * (3.0 - 2.0 * t);
        const double h11 = t * t * (t - 1.0);
        return h00 * y[i] + h10 * h * slope[i] + h01 * y[i + 1] + h11 * h * slope[i + 1];
    }
};

}  // namespace fhdam_detail

struct FHDensity {
    ValidatedFamily fam;
    bool nonneg_checked = false;

    // Inverse-CDF sampling grid, populated by build_sampler.
    std::vector<double> grid_nodes;   // increasing, positive
    std::vector<double> grid_cdf;     // non-decreasing, within [0, 1]
    fhdam_detail::MonotoneCubic quantile;  // cdf -> log(node)

    bool has_sampler() const { return fam.white_noise || !grid_nodes.empty(); }
};

inline FHDensity fh_density(ValidatedFamily fam) {
    FHDensity out;
    out.fam = std::move(fam);
    return out;
}

// Pointwise density (1/K) H^{m,0}_{p,m}(tau). Values in (-tol_neg, 0) from
// contour round-off are clamped to 0.
inline double fh_pdf(const FHDensity& rho, double tau) {
    if (!(tau > 0.0)) throw argument_error("density: tau must be positive");
    if (rho.fam.white_noise) {
        throw unsupported_error("density: point-mass mixing law has no density");
    }
    const ContourTable& table = mixing_table(rho.fam);
    double h;
    if (table.covers(tau)) {
        h = table(tau);
    } else if (tau > table.z_hi()) {
        h = 0.0;  // beyond the superexponential cutoff
    } else {
        // Below the table's left edge the contour oscillates too fast for
        // double precision; the residue expansion is exact there.
        h = mixing_small_arg(rho.fam, tau);
    }
    double v = h / rho.fam.K;
    const double tol_neg = 1e-10;
    if (v < 0.0 && v > -tol_neg) v = 0.0;
    return v;
}

// Exact moment E[tau^l] = (1/K) prod Gamma(b_j + beta_j (l+1)) /
// prod Gamma(a_i + alpha_i (l+1)), in log space. Defined for any real l
// with all Gamma arguments positive; integer l >= 0 always qualifies under
// validated parameters.
inline double fh_moment(const FHDensity& rho, double l) {
    double log_m = -rho.fam.log_K;
    double sign = 1.0;
    for (const auto& [b, beta] : rho.fam.lower) {
        const double arg = b + beta * (l + 1.0);
        if (arg <= 0.0 && arg == std::floor(arg)) {
            throw pole_error("moment: gamma pole at lower argument " + std::to_string(arg));
        }
        const auto g = log_abs_gamma(arg);
        log_m += g.log_abs;
        sign *= g.sign;
    }
    for (const auto& [a, alpha] : rho.fam.upper) {
        const double arg = a + alpha * (l + 1.0);
        if (arg <= 0.0 && arg == std::floor(arg)) {
            throw pole_error("moment: gamma pole at upper argument " + std::to_string(arg));
        }
        const auto g = log_abs_gamma(arg);
        log_m -= g.log_abs;
        sign *= g.sign;
    }
    return sign * std::exp(log_m);
}

// Laplace transform E[e^{-s tau}] = (1/K) Psi(-s).
inline double fh_laplace(const FHDensity& rho, double s, double rtol = 1e-10) {
    if (!(s >= 0.0) && !rho.fam.entire) {
        throw unsupported_error("laplace: s < 0 needs an entire family");
    }
    const std::complex<double> v = family_psi(rho.fam, -s, rtol);
    return v.real() / rho.fam.K;
}

namespace fhdam_detail {

inline double tail_mass_below(const FHDensity& rho, double q) {
    // Left-tail densities can be endpoint-singular (tau^{b/beta} with
    // b/beta in (-1, 0]); Gauss-Legendre never samples the endpoint, so a
    // direct finite-interval pass converges for every integrable tail.
    auto f = [&](double t) { return t > 0.0 ? fh_pdf(rho, t) : 0.0; };
    return integrate(f, 0.0, q, 1e-4).value;
}

inline double tail_mass_above(const FHDensity& rho, double q, double hi) {
    if (q >= hi) return 0.0;
    // When the moment bound already puts the tail below quadrature
    // resolution, integrating would only accumulate contour noise.
    const double bound = mixing_tail_bound(rho.fam, q);
    if (bound < 1e-14) return bound;
    auto f = [&](double t) { return fh_pdf(rho, t); };
    return integrate(f, q, hi, 1e-4).value;
}

}  // namespace fhdam_detail

// Tabulate the CDF on a log-spaced grid whose ends carry at most
// target_quantile_tail of mass each, scan for negative density values, and
// build the monotone inverse-CDF interpolant.
inline FHDensity build_sampler(FHDensity rho, double target_quantile_tail = 1e-8) {
    if (rho.fam.white_noise) {
        rho.nonneg_checked = true;
        return rho;  // constant sampler; no grid needed
    }
    using namespace fhdam_detail;
    const ContourTable& table = mixing_table(rho.fam);

    // Bracket the quantile range. The density decays faster than any power
    // on the right; geometric expansion terminates.
    double q_hi = 2.0;
    while (q_hi < table.z_hi() &&
           (fh_pdf(rho, q_hi) * q_hi > 1e-12 ||
            tail_mass_above(rho, q_hi, table.z_hi()) > target_quantile_tail)) {
        q_hi *= 1.5;
    }
    q_hi = std::min(q_hi, table.z_hi());
    double q_lo = 0.25;
    int lo_steps = 0;
    while (tail_mass_below(rho, q_lo) > target_quantile_tail) {
        q_lo *= 0.5;
        if (++lo_steps > 60) {
            throw state_error("build_sampler: left tail failed to bracket");
        }
    }

    // Non-negativity scan (the class assumption is numerical here, not a
    // theorem): 512 log-spaced points across the quantile range.
    {
        double max_d = 0.0, min_d = 0.0;
        const int scan_n = 512;
        const double llo = std::log(q_lo), lhi = std::log(q_hi);
        for (int i = 0; i < scan_n; ++i) {
            const double t = std::exp(llo + (lhi - llo) * i / (scan_n - 1.0));
            const double v = table(t) / rho.fam.K;
            max_d = std::max(max_d, v);
            min_d = std::min(min_d, v);
        }
        if (min_d < -1e-10 * std::max(max_d, 1e-300)) {
            throw state_error("build_sampler: density scan found negative value " +
                              std::to_string(min_d) + " (max " + std::to_string(max_d) + ")");
        }
    }
    rho.nonneg_checked = true;

    // CDF accumulation: one 15-point Gauss-Legendre panel per log-spaced
    // interval. Intervals are narrow enough that single-panel error is far
    // below the tail target.
    const int n_nodes = 400;
    rho.grid_nodes.resize(n_nodes);
    rho.grid_cdf.resize(n_nodes);
    const double llo = std::log(q_lo), lhi = std::log(q_hi);
    for (int i = 0; i < n_nodes; ++i) {
        rho.grid_nodes[i] = std::exp(llo + (lhi - llo) * i / (n_nodes - 1.0));
    }
    auto pdf = [&](double t) { return std::max(0.0, table(t) / rho.fam.K); };
    double acc = tail_mass_below(rho, q_lo);
    rho.grid_cdf[0] = acc;
    for (int i = 1; i < n_nodes; ++i) {
        const double a = rho.grid_nodes[i - 1], b = rho.grid_nodes[i];
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        double s = detail::kGL15Weight[0] * pdf(c);
        for (int j = 1; j < 8; ++j) {
            s += detail::kGL15Weight[j] * (pdf(c - h * detail::kGL15Node[j]) + pdf(c + h * detail::kGL15Node[j]));
        }
        acc += h * s;
        rho.grid_cdf[i] = std::min(acc, 1.0);
    }
    if (std::fabs(acc + tail_mass_above(rho, q_hi, table.z_hi()) - 1.0) > 1e-5) {
        throw state_error("build_sampler: tabulated mass " + std::to_string(acc) +
                          " plus tails is not 1");
    }
    // Strictly increasing CDF values are required by the interpolant; merge
    // flat stretches (possible in deep tails) by nudging.
    for (int i = 1; i < n_nodes; ++i) {
        if (rho.grid_cdf[i] <= rho.grid_cdf[i - 1]) {
            rho.grid_cdf[i] = std::nextafter(rho.grid_cdf[i - 1], 2.0);
        }
    }
    // The nudge can walk a clamped-at-1 stretch past 1; cap from the top
    // while keeping strict increase (values already below the cap chain
    // are strictly below their successor and stay untouched).
    double cap = 1.0;
    for (int i = n_nodes - 1; i >= 1; --i) {
        if (rho.grid_cdf[i] > cap) rho.grid_cdf[i] = cap;
        cap = std::nextafter(rho.grid_cdf[i], 0.0);
    }

    std::vector<double> log_nodes(rho.grid_nodes.size());
    for (size_t i = 0; i < rho.grid_nodes.size(); ++i) log_nodes[i] = std::log(rho.grid_nodes[i]);
    rho.quantile.build(rho.grid_cdf, log_nodes);
    return rho;
}

// One inverse-CDF draw. Grid-edge uniforms clamp to the edge nodes; each
// edge carries at most the construction-time tail mass.
inline double fh_sample(const FHDensity& rho, RngState& rng) {
    if (rho.fam.white_noise) {
        (void)rng.uniform();  // keep stream consumption uniform across families
        return 1.0;
    }
    if (rho.grid_nodes.empty()) {
        throw state_error("sample: sampler not built (call build_sampler first)");
    }
    const double u = rng.uniform();
    return std::exp(rho.quantile(u));
}

// Two-column CSV export of the tabulated CDF for audit.
inline void export_cdf_csv(const FHDensity& rho, std::ostream& os) {
    if (rho.fam.white_noise) {
        throw unsupported_error("export_cdf_csv: point-mass mixing law has no CDF table");
    }
    if (rho.grid_nodes.empty()) throw state_error("export_cdf_csv: sampler not built");
    os << "node,cdf\n";
    char buf[64];
    for (size_t i = 0; i < rho.grid_nodes.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", rho.grid_nodes[i]);
        os << buf << ",";
        std::snprintf(buf, sizeof buf, "%.17g", rho.grid_cdf[i]);
        os << buf << "\n";
    }
}

}  // namespace gwright
