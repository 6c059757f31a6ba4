#pragma once

// Finite-dimensional generalized Wright measures: characteristic function,
// Laplace transform of exponentials, mixed moments, Lebesgue density, batch
// sampling through the Gaussian scale-mixture representation, and the
// T-transform of exponential integrands.
//
// Every formula depends on vectors only through Euclidean pairings, so d
// coordinates stand for any d-dimensional orthonormal projection.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "gwright/errors.hpp"
#include "gwright/fhdam.hpp"
#include "gwright/rng.hpp"
#include "gwright/wright.hpp"

namespace gwright {

struct MultiIndex {
    std::vector<int> k;

    explicit MultiIndex(std::vector<int> idx) : k(std::move(idx)) {
        for (int v : k) {
            if (v < 0) throw argument_error("MultiIndex: entries must be non-negative");
        }
    }
    int dim() const { return static_cast<int>(k.size()); }
    int total() const {
        int t = 0;
        for (int v : k) t += v;
        return t;
    }
};

struct SampleMatrix {
    std::vector<double> data;  // row-major, n * d
    std::int64_t n = 0;
    int d = 0;

    double at(std::int64_t i, int j) const { return data[static_cast<size_t>(i) * d + j]; }
};

struct GWMeasure {
    FHDensity mixing;
    int d = 1;
};

// Builds the measure and its mixing sampler in one step; the sampler also
// provides the contour table used by density quadrature.
inline GWMeasure gw_measure(ValidatedFamily fam, int d) {
    if (d < 1) throw argument_error("gw_measure: d must be >= 1");
    GWMeasure mu;
    mu.mixing = build_sampler(fh_density(std::move(fam)));
    mu.d = d;
    return mu;
}

inline GWMeasure gw_measure(FHDensity mixing, int d) {
    if (d < 1) throw argument_error("gw_measure: d must be >= 1");
    if (!mixing.has_sampler()) mixing = build_sampler(std::move(mixing));
    return GWMeasure{std::move(mixing), d};
}

namespace measure_detail {

inline double dot(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size()) throw argument_error("pairing: dimension mismatch");
    double s = 0.0;
    for (size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

inline void check_dim(const GWMeasure& mu, size_t got, const char* what) {
    if (static_cast<int>(got) != mu.d) {
        throw argument_error(std::string(what) + ": expected " + std::to_string(mu.d) +
                             " coordinates, got " + std::to_string(got));
    }
}

// Density hypothesis 2(b_j + beta_j) > beta_j d; reports the failing index.
inline void check_density_hypothesis(const ValidatedFamily& fam, int d) {
    for (size_t j = 0; j < fam.lower.size(); ++j) {
        const auto& [b, beta] = fam.lower[j];
        if (!(2.0 * (b + beta) > beta * d)) {
            throw unsupported_error(
                "density: lower pair " + std::to_string(j + 1) + " violates 2(b+beta) > beta*d (" +
                std::to_string(2.0 * (b + beta)) + " vs " + std::to_string(beta * d) + ")");
        }
    }
}

inline int env_thread_cap() {
    const char* s = std::getenv("GWRIGHT_THREADS");
    if (!s || !*s) return 1;
    const long v = std::strtol(s, nullptr, 10);
    if (v < 1) return 1;
    return static_cast<int>(std::min(v, 256L));
}

}  // namespace measure_detail

// Characteristic function (1/K) Psi(-(y,y)/2); real, in (0, 1].
inline double char_fn(const GWMeasure& mu, const std::vector<double>& y, double rtol = 1e-10) {
    measure_detail::check_dim(mu, y.size(), "char_fn");
    const double yy = measure_detail::dot(y, y);
    const std::complex<double> v = family_psi(mu.mixing.fam, -0.5 * yy, rtol);
    return v.real() / mu.mixing.fam.K;
}

// Laplace transform of e^{lambda <.,phi>}: (1/K) Psi(+lambda^2 (phi,phi)/2).
// Positive arguments beyond the trivial one need an entire family — for
// a* >= 1 the series diverges and no contour route covers positive reals.
inline double laplace_fn(const GWMeasure& mu, double lambda, const std::vector<double>& phi,
                         double rtol = 1e-10) {
    measure_detail::check_dim(mu, phi.size(), "laplace_fn");
    const double arg = 0.5 * lambda * lambda * measure_detail::dot(phi, phi);
    if (arg > 0.0 && !mu.mixing.fam.entire) {
        throw unsupported_error("laplace_fn: positive argument needs an entire family");
    }
    const std::complex<double> v = family_psi(mu.mixing.fam, arg, rtol);
    return v.real() / mu.mixing.fam.K;
}

// Mixed moment E[prod x_i^{k_i}]: zero when any k_i is odd; otherwise with
// k_i = 2 n_i and n = sum n_i,
//   mixing_moment(n) * prod (2 n_i - 1)!!.
// The equivalent direct Gamma-ratio/multinomial form is evaluated alongside
// as an internal consistency guard.
inline double mixed_moment(const GWMeasure& mu, const MultiIndex& k) {
    measure_detail::check_dim(mu, k.k.size(), "mixed_moment");
    for (int v : k.k) {
        if (v % 2 == 1) return 0.0;
    }
    long double fac = 1.0L;   // prod (2 n_i - 1)!!
    double log_fac2 = 0.0;    // log of prod (2 n_i)! / (n_i! 2^{n_i})
    int n = 0;
    for (int v : k.k) {
        const int ni = v / 2;
        n += ni;
        for (int j = 1; j <= ni; ++j) fac *= 2.0L * j - 1.0L;
        log_fac2 += std::lgamma(2.0 * ni + 1.0) - std::lgamma(ni + 1.0) -
                    ni * 0.6931471805599453094;
    }
    const double mom = fh_moment(mu.mixing, n);
    const double value = mom * static_cast<double>(fac);
    const double value2 = mom * std::exp(log_fac2);
    if (std::fabs(value - value2) > 1e-12 * std::max(std::fabs(value), 1.0)) {
        throw state_error("mixed_moment: double-factorial and multinomial forms disagree");
    }
    return value;
}

// Lebesgue density at x through the scale-mixture integral
//   (2 pi)^{-d/2} (1/K) Int_0^inf tau^{-d/2} e^{-(x,x)/(2 tau)} H(tau) dtau,
// with tau = v^2 so the integrand is regular at the origin for d = 1.
inline double gwm_density(const GWMeasure& mu, const std::vector<double>& x,
                          double rtol = 1e-8) {
    measure_detail::check_dim(mu, x.size(), "density");
    const ValidatedFamily& fam = mu.mixing.fam;
    const double xx = measure_detail::dot(x, x);
    const double norm = std::pow(2.0 * M_PI, -0.5 * mu.d);
    if (fam.white_noise) return norm * std::exp(-0.5 * xx);
    measure_detail::check_density_hypothesis(fam, mu.d);

    const ContourTable& table = mixing_table(fam);
    const double v_hi = std::sqrt(table.z_hi());
    const double z_lo = table.z_lo();
    auto integrand = [&](double v) -> double {
        if (v <= 0.0) return 0.0;
        const double tau = v * v;
        const double h = table(std::max(tau, z_lo));
        if (h == 0.0) return 0.0;
        const double e = xx > 0.0 ? std::exp(-0.5 * xx / tau) : 1.0;
        return std::pow(v, 1 - mu.d) * e * h;
    };
    const double integral = integrate(integrand, 0.0, v_hi, rtol).value;
    return 2.0 * norm * integral / fam.K;
}

// Cross-check route: the same density as a single Fox-H evaluation at
// (x,x)/2 with half-d-shifted parameters and an extra (0,1) lower pair.
// Needs x != 0 (the contour form is for positive argument).
inline double gwm_density_foxh(const GWMeasure& mu, const std::vector<double>& x,
                               double rtol = 1e-8) {
    measure_detail::check_dim(mu, x.size(), "density");
    const ValidatedFamily& fam = mu.mixing.fam;
    const double xx = measure_detail::dot(x, x);
    const double norm = std::pow(2.0 * M_PI, -0.5 * mu.d);
    if (fam.white_noise) return norm * std::exp(-0.5 * xx);
    measure_detail::check_density_hypothesis(fam, mu.d);
    if (!(xx > 0.0)) {
        throw argument_error("density (contour route): x must be nonzero");
    }
    FoxHParams h;
    h.m = fam.m() + 1;
    h.n = 0;
    const double shift = 1.0 - 0.5 * mu.d;
    for (const auto& [a, alpha] : fam.upper) h.upper.emplace_back(a + alpha * shift, alpha);
    h.lower.emplace_back(0.0, 1.0);
    for (const auto& [b, beta] : fam.lower) h.lower.emplace_back(b + beta * shift, beta);
    FoxHOptions opt;
    opt.rtol = rtol;
    return norm * foxh_eval(h, 0.5 * xx, opt) / fam.K;
}

// N x d sample matrix: row i draws tau from the mixing law and scales a
// standard normal d-vector by sqrt(tau). Every row uses its own counter
// substream of the seed state, so output is identical for any thread count
// (set GWRIGHT_THREADS to parallelize).
inline SampleMatrix sample_batch(const GWMeasure& mu, RngState root, std::int64_t N) {
    if (N < 1) throw argument_error("sample_batch: N must be >= 1");
    if (!mu.mixing.has_sampler()) {
        throw state_error("sample_batch: mixing sampler not built");
    }
    SampleMatrix out;
    out.n = N;
    out.d = mu.d;
    out.data.resize(static_cast<size_t>(N) * mu.d);

    auto fill_rows = [&](std::int64_t i0, std::int64_t i1) {
        for (std::int64_t i = i0; i < i1; ++i) {
            RngState rs = root.substream(static_cast<uint64_t>(i));
            const double tau = fh_sample(mu.mixing, rs);
            const double s = std::sqrt(tau);
            for (int j = 0; j < mu.d; ++j) {
                out.data[static_cast<size_t>(i) * mu.d + j] = s * rs.normal();
            }
        }
    };

    const int threads = std::min<std::int64_t>(measure_detail::env_thread_cap(), N);
    if (threads <= 1) {
        fill_rows(0, N);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        const std::int64_t chunk = (N + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const std::int64_t i0 = t * chunk;
            const std::int64_t i1 = std::min<std::int64_t>(N, i0 + chunk);
            if (i0 >= i1) break;
            pool.emplace_back(fill_rows, i0, i1);
        }
        for (auto& th : pool) th.join();
    }
    return out;
}

// T-transform of the exponential integrand at test direction x eta with a
// complex shift phi = phi_re + i phi_im:
//   (1/K) Psi(-x^2 <eta,eta>/2 - <phi,phi>/2 - x <phi,eta>),
// all pairings bilinear (no conjugation).
inline std::complex<double> t_transform_exp(const GWMeasure& mu, double x,
                                            const std::vector<double>& eta,
                                            const std::vector<double>& phi_re,
                                            const std::vector<double>& phi_im,
                                            double rtol = 1e-10) {
    using measure_detail::dot;
    measure_detail::check_dim(mu, eta.size(), "t_transform_exp");
    measure_detail::check_dim(mu, phi_re.size(), "t_transform_exp");
    measure_detail::check_dim(mu, phi_im.size(), "t_transform_exp");
    const ValidatedFamily& fam = mu.mixing.fam;
    if (!fam.entire) {
        throw unsupported_error("t_transform_exp: needs an entire family");
    }
    const double ee = dot(eta, eta);
    const std::complex<double> pp(dot(phi_re, phi_re) - dot(phi_im, phi_im),
                                  2.0 * dot(phi_re, phi_im));
    const std::complex<double> pe(dot(phi_re, eta), dot(phi_im, eta));
    const std::complex<double> arg = -0.5 * x * x * ee - 0.5 * pp - x * pe;
    return family_psi(fam, arg, rtol) / fam.K;
}

// CSV export: header x1..xd, one row per draw, 17 significant digits.
inline void write_samples_csv(const SampleMatrix& s, std::ostream& os) {
    for (int j = 0; j < s.d; ++j) os << (j ? ",x" : "x") << (j + 1);
    os << "\n";
    char buf[64];
    for (std::int64_t i = 0; i < s.n; ++i) {
        for (int j = 0; j < s.d; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", s.at(i, j));
            if (j) os << ",";
            os << buf;
        }
        os << "\n";
    }
}

}  // namespace gwright
