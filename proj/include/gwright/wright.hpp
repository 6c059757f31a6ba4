#pragma once

// Parameter validation and series evaluation for generalized Wright
// functions.
//
// gwf sums  sum_k  prod Gamma(B_i + beta_i k) / prod Gamma(A_j + alpha_j k)
//                  * z^k / k!
// in log space with extended-precision compensated accumulation. Alternating
// arguments are cancellation-prone; when the cancellation indicator
// (sum of |term| over |sum|) exceeds 1e8 the evaluator defers to the
// Mellin-Barnes contour for real negative arguments, and family_psi
// additionally covers complex arguments through the Laplace integral of the
// family's mixing density.

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gwright/complex_gamma.hpp"
#include "gwright/errors.hpp"
#include "gwright/foxh.hpp"
#include "gwright/quadrature.hpp"

namespace gwright {

// Raw family parameters as read from user input.
//   upper: (a_i, alpha_i), i = 1..p     lower: (b_j, beta_j), j = 1..m
struct WrightParams {
    param_pairs upper;
    param_pairs lower;
    // Admits the degenerate m = p = 0 family (Gaussian white noise), whose
    // mixing law is the unit point mass.
    bool allow_white_noise = false;
};

// A parameter set that passed validation, with the derived quantities every
// downstream module needs.
struct ValidatedFamily {
    param_pairs upper;  // (a_i, alpha_i)
    param_pairs lower;  // (b_j, beta_j)
    double a_star = 0.0;     // sum beta_j - sum alpha_i
    double mu = 0.0;         // sum b_j - sum a_i - (p - m)/2
    double K = 1.0;          // prod Gamma(b_j + beta_j) / prod Gamma(a_i + alpha_i)
    double log_K = 0.0;
    bool entire = false;     // Psi extends to an entire function
    bool white_noise = false;

    int p() const { return static_cast<int>(upper.size()); }
    int m() const { return static_cast<int>(lower.size()); }

    // Lazily built wide-range contour table for the mixing density; shared
    // across copies. Used by the complex-argument Psi fallback.
    mutable std::shared_ptr<const ContourTable> psi_mixing_table;
};

// Check every admissibility constraint and report all violations together.
inline ValidatedFamily validate(const WrightParams& raw, bool require_entire = false) {
    std::vector<std::string> issues;
    const int p = static_cast<int>(raw.upper.size());
    const int m = static_cast<int>(raw.lower.size());

    for (int i = 0; i < p; ++i) {
        const auto& [a, alpha] = raw.upper[i];
        if (!(alpha > 0.0)) {
            issues.push_back("alpha_" + std::to_string(i + 1) + " = " + std::to_string(alpha) +
                             " must be positive");
        }
        if (!(a + alpha > 0.0)) {
            issues.push_back("a_" + std::to_string(i + 1) + " + alpha_" + std::to_string(i + 1) +
                             " = " + std::to_string(a + alpha) + " must be positive");
        }
    }
    for (int j = 0; j < m; ++j) {
        const auto& [b, beta] = raw.lower[j];
        if (!(beta > 0.0)) {
            issues.push_back("beta_" + std::to_string(j + 1) + " = " + std::to_string(beta) +
                             " must be positive");
        }
        if (!(b + beta > 0.0)) {
            issues.push_back("b_" + std::to_string(j + 1) + " + beta_" + std::to_string(j + 1) +
                             " = " + std::to_string(b + beta) + " must be positive");
        }
    }

    double a_star = 0.0, mu = 0.0;
    for (const auto& [b, beta] : raw.lower) { a_star += beta; mu += b; }
    for (const auto& [a, alpha] : raw.upper) { a_star -= alpha; mu -= a; }
    mu -= 0.5 * (p - m);

    const bool degenerate = (p == 0 && m == 0);
    if (degenerate) {
        if (!raw.allow_white_noise) {
            issues.push_back(
                "empty parameter lists describe the white-noise family; "
                "set allow_white_noise to accept it");
        }
    } else if (!(a_star > 0.0) && !(a_star == 0.0 && mu < -1.0)) {
        issues.push_back("need a* > 0, or a* = 0 with mu < -1 (a* = " + std::to_string(a_star) +
                         ", mu = " + std::to_string(mu) + ")");
    }

    // The Psi series is entire iff its term growth exponent a* - 1 is
    // negative; the degenerate family's Psi is exp, entire as well.
    const bool entire = (a_star > 0.0 && a_star < 1.0) || degenerate;
    if (require_entire && !entire) {
        issues.push_back("family is not entire (a* = " + std::to_string(a_star) +
                         " outside (0,1))");
    }

    if (!issues.empty()) throw validation_error(std::move(issues));

    ValidatedFamily fam;
    fam.upper = raw.upper;
    fam.lower = raw.lower;
    fam.a_star = a_star;
    fam.mu = mu;
    fam.white_noise = degenerate;
    fam.entire = entire;
    double log_K = 0.0;
    for (const auto& [b, beta] : raw.lower) log_K += std::lgamma(b + beta);
    for (const auto& [a, alpha] : raw.upper) log_K -= std::lgamma(a + alpha);
    fam.log_K = log_K;
    fam.K = std::exp(log_K);
    return fam;
}

enum class SeriesRoute { series, contour, laplace_integral, closed_form };

struct SeriesDiagnostics {
    int terms = 0;
    double cancellation = 1.0;  // sum |term| / |sum|
    bool precision_warning = false;
    bool converged = true;
    SeriesRoute route = SeriesRoute::series;
};

namespace wright_detail {

constexpr double kCancellationLimit = 1e8;
constexpr int kSeriesCap = 10000;

struct SeriesOutcome {
    std::complex<double> value;
    SeriesDiagnostics diag;
};

// Log-space term-by-term summation. Terms are built in extended precision
// (signed log magnitude plus complex phase from z^k) and accumulated with
// compensated addition, so the reported cancellation indicator is the only
// accuracy limit the caller has to judge.
inline SeriesOutcome series_sum(const param_pairs& numer, const param_pairs& denom,
                                std::complex<double> z, double rtol) {
    using cl = std::complex<long double>;
    SeriesOutcome out;

    const bool z_zero = (z.real() == 0.0 && z.imag() == 0.0);
    const cl log_z = z_zero ? cl(0.0L, 0.0L)
                            : cl(std::log(std::abs(std::complex<long double>(z))),
                                 std::atan2((long double)z.imag(), (long double)z.real()));

    cl sum = 0.0L, comp = 0.0L;
    long double abs_sum = 0.0L;
    int small_streak = 0;
    int k = 0;
    for (; k <= kSeriesCap; ++k) {
        long double log_mag = -std::lgamma((long double)k + 1.0L);
        int sign = 1;
        bool ok = true;
        for (const auto& [B, beta] : numer) {
            const long double arg = (long double)B + (long double)beta * k;
            if (arg <= 0.0L && arg == std::floor(arg)) {
                throw pole_error("gwf: numerator gamma pole in term k = " + std::to_string(k) +
                                 " at argument " + std::to_string((double)arg));
            }
            const auto g = log_abs_gamma_l(arg);
            log_mag += g.log_abs;
            sign *= g.sign;
        }
        for (const auto& [A, alpha] : denom) {
            const long double arg = (long double)A + (long double)alpha * k;
            if (arg <= 0.0L && arg == std::floor(arg)) {
                // A denominator pole annihilates the term.
                ok = false;
                break;
            }
            const auto g = log_abs_gamma_l(arg);
            log_mag -= g.log_abs;
            sign *= g.sign;
        }

        cl term = 0.0L;
        if (ok) {
            if (z_zero) {
                term = (k == 0) ? cl((long double)sign * std::exp(log_mag), 0.0L) : cl(0.0L);
            } else {
                const cl e = std::exp(cl(log_mag, 0.0L) + (long double)k * log_z);
                term = (long double)sign * e;
            }
        }

        // Compensated (Kahan) accumulation.
        const cl y = term - comp;
        const cl t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        const long double tmag = std::abs(term);
        abs_sum += tmag;

        if (!std::isfinite((double)std::abs(sum)) || abs_sum > 1e4800L) {
            out.diag.converged = false;  // magnitude escaped; only a contour route can help
            break;
        }

        const long double smag = std::abs(sum);
        if (k >= 8) {
            if (tmag < (long double)rtol * smag) {
                if (++small_streak >= 3) { ++k; break; }
            } else {
                small_streak = 0;
            }
        }
        if (z_zero && k >= 8) break;
    }

    out.diag.terms = std::min(k, kSeriesCap);
    if (k > kSeriesCap) out.diag.converged = false;
    const double smag = (double)std::abs(sum);
    out.diag.cancellation = smag > 0.0 ? (double)(abs_sum / std::abs(sum)) : 1.0;
    out.value = std::complex<double>((double)sum.real(), (double)sum.imag());
    if (out.diag.cancellation > kCancellationLimit) out.diag.precision_warning = true;
    return out;
}

inline bool is_real(const std::complex<double>& z) {
    return std::fabs(z.imag()) <= 1e-14 * std::max(1.0, std::fabs(z.real()));
}

}  // namespace wright_detail

// Generalized Wright function with explicit numerator pairs (B_i, beta_i)
// and denominator pairs (A_j, alpha_j). Returns the series value; for
// cancellation-dominated real negative arguments it defers to the contour
// representation when that route is admissible.
inline std::complex<double> gwf_ex(const param_pairs& numer, const param_pairs& denom,
                                   std::complex<double> z, double rtol,
                                   SeriesDiagnostics* diag_out) {
    using namespace wright_detail;
    for (const auto& [B, beta] : numer) {
        (void)B;
        if (!(beta > 0.0)) throw argument_error("gwf: numerator scales must be positive");
    }
    for (const auto& [A, alpha] : denom) {
        (void)A;
        if (!(alpha > 0.0)) throw argument_error("gwf: denominator scales must be positive");
    }

    auto outcome = series_sum(numer, denom, z, rtol);
    const bool needs_fallback = outcome.diag.precision_warning || !outcome.diag.converged;
    if (needs_fallback && is_real(z) && z.real() < 0.0) {
        bool contour_ok = true;
        for (const auto& [B, beta] : numer) {
            if (!(B > 0.0) || !(beta > 0.0)) contour_ok = false;
        }
        if (contour_ok) {
            const double v = gwf_via_foxh(numer, denom, -z.real(), rtol);
            outcome.value = v;
            outcome.diag.route = SeriesRoute::contour;
            outcome.diag.converged = true;
        }
    }
    if (!outcome.diag.converged && outcome.diag.route == SeriesRoute::series) {
        throw convergence_error("gwf: series did not converge within the term cap",
                                std::abs(outcome.value), outcome.diag.cancellation);
    }
    if (diag_out) *diag_out = outcome.diag;
    return outcome.value;
}

inline std::complex<double> gwf(const param_pairs& numer, const param_pairs& denom,
                                std::complex<double> z, double rtol = 1e-8) {
    return gwf_ex(numer, denom, z, rtol, nullptr);
}

// Shifted parameter lists of the family's Psi function:
// numerator (b_j + beta_j, beta_j), denominator (a_i + alpha_i, alpha_i).
inline param_pairs psi_numer(const ValidatedFamily& fam) {
    param_pairs out;
    for (const auto& [b, beta] : fam.lower) out.emplace_back(b + beta, beta);
    return out;
}

inline param_pairs psi_denom(const ValidatedFamily& fam) {
    param_pairs out;
    for (const auto& [a, alpha] : fam.upper) out.emplace_back(a + alpha, alpha);
    return out;
}

// Mixing-density H parameters: H^{m,0}_{p,m}[. | (a_i,alpha_i); (b_j,beta_j)].
inline FoxHParams mixing_h_params(const ValidatedFamily& fam) {
    FoxHParams h;
    h.m = fam.m();
    h.n = 0;
    h.upper = fam.upper;
    h.lower = fam.lower;
    return h;
}

// log E[tau^l] for the mixing law, a closed-form gamma ratio.
inline long double mixing_log_moment(const ValidatedFamily& fam, double l) {
    long double lm = -static_cast<long double>(fam.log_K);
    for (const auto& [b, beta] : fam.lower) lm += std::lgammal(b + beta * (l + 1.0L));
    for (const auto& [a, alpha] : fam.upper) lm -= std::lgammal(a + alpha * (l + 1.0L));
    return lm;
}

// Chebyshev-Markov bound on the mixing law's mass above q: E[tau^l] / q^l,
// minimized over dyadic l. Finite and eventually tiny in q because the
// density decays superexponentially. Lets tail queries skip quadrature that
// would only accumulate contour noise.
inline double mixing_tail_bound(const ValidatedFamily& fam, double q) {
    if (!(q > 0.0)) return std::numeric_limits<double>::infinity();
    const long double lq = std::log(static_cast<long double>(q));
    long double best = std::numeric_limits<long double>::infinity();
    for (int l = 4; l <= 512; l *= 2) {
        best = std::min(best, mixing_log_moment(fam, l) - l * lq);
    }
    return static_cast<double>(std::exp(std::min(best, 700.0L)));
}

// Shared wide-range contour table for the family's mixing density, built on
// first use and cached on the family. Range: from deep inside the left tail
// up to where the superexponentially decaying density carries no mass at
// double precision. Used by the density, sampling, mixture-quadrature, and
// Laplace-fallback paths alike. First call is not thread-safe; evaluation
// afterwards is.
inline const ContourTable& mixing_table(const ValidatedFamily& fam) {
    if (fam.white_noise) {
        throw unsupported_error("mixing_table: point-mass mixing law has no density");
    }
    if (!fam.psi_mixing_table) {
        FoxHParams h = mixing_h_params(fam);
        FoxHOptions opt;
        opt.rtol = 1e-10;
        // Kernel magnitude near the peak fixes what "zero" means for tail
        // evaluations.
        FoxHOptions probe_opt = opt;
        probe_opt.atol = 1e-18;
        const double peak = foxh_eval(h, 1.0, probe_opt);
        // Right edge from the mixing law's own moments: mass above q is at
        // most E[tau^l] / q^l, and the moments are closed-form gamma ratios.
        // Minimizing the bound over dyadic l gives a finite cutoff because
        // the density decays superexponentially; probing the density far out
        // instead would only measure quadrature noise.
        double best = std::numeric_limits<double>::infinity();
        for (int l = 4; l <= 512; l *= 2) {
            // Smallest q with the bound below 1e-18.
            const double q = std::exp(
                (static_cast<double>(mixing_log_moment(fam, l)) + 18.0 * std::log(10.0)) / l);
            best = std::min(best, q);
        }
        const double hi = std::max(4.0, 2.0 * best);
        opt.atol = std::max(1e-18, 1e-15 * std::fabs(peak));
        // Left edge: below 1e-8 the contour phases oscillate at frequency
        // |log z| with amplitude z^{-gamma}, and double-precision roundoff in
        // the oscillatory sum exceeds the table's own tolerance. Callers
        // clamp smaller arguments to z_lo; the density is continuous at the
        // origin for every admissible family, so the clamp error is O(z_lo).
        fam.psi_mixing_table =
            std::make_shared<const ContourTable>(std::move(h), 1e-8, hi, opt);
    }
    return *fam.psi_mixing_table;
}

// Mixing density H(tau) for small tau by residue expansion: shifting the
// Mellin contour across the leftmost numerator poles s = -(b_j + k)/beta_j
// picks up terms c_jk tau^{(b_j+k)/beta_j}. Terms are collected up to two
// exponent units past the leading one, so the remainder is below double
// precision for tau <= 1e-8 (the contour table's left edge). Returns the
// same un-normalized scale as the table. Near-colliding pole pairs would
// need logarithmic terms; those parameters are rejected.
inline double mixing_small_arg(const ValidatedFamily& fam, double tau) {
    if (fam.white_noise) {
        throw unsupported_error("mixing_small_arg: point-mass mixing law has no density");
    }
    if (!(tau > 0.0)) throw argument_error("mixing_small_arg: tau must be positive");
    double lead = std::numeric_limits<double>::infinity();
    for (const auto& [b, beta] : fam.lower) lead = std::min(lead, b / beta);
    const double cap = lead + 2.0;
    const double log_tau = std::log(tau);
    long double sum = 0.0L;
    for (size_t j = 0; j < fam.lower.size(); ++j) {
        const auto [bj, betaj] = fam.lower[j];
        for (int k = 0;; ++k) {
            const double e = (bj + k) / betaj;
            if (e > cap) break;
            const double s = -e;
            // Residue of Gamma(b_j + beta_j s) at the pole, then the rest of
            // the kernel evaluated there.
            double sign = (k % 2 == 0) ? 1.0 : -1.0;
            double lg = -std::lgamma(k + 1.0) - std::log(betaj);
            bool vanishes = false;
            for (size_t j2 = 0; j2 < fam.lower.size(); ++j2) {
                if (j2 == j) continue;
                const double arg = fam.lower[j2].first + fam.lower[j2].second * s;
                if (arg <= 1e-9 && std::fabs(arg - std::round(arg)) < 1e-9) {
                    throw unsupported_error(
                        "mixing_small_arg: colliding Mellin poles; small-argument "
                        "expansion would need logarithmic terms");
                }
                const auto g = log_abs_gamma(arg);
                lg += g.log_abs;
                sign *= g.sign;
            }
            for (const auto& [a, alpha] : fam.upper) {
                const double arg = a + alpha * s;
                if (arg <= 1e-9 && std::fabs(arg - std::round(arg)) < 1e-9) {
                    vanishes = true;  // reciprocal gamma zero
                    break;
                }
                const auto g = log_abs_gamma(arg);
                lg -= g.log_abs;
                sign *= g.sign;
            }
            if (!vanishes) sum += sign * std::exp(static_cast<long double>(lg) + e * log_tau);
        }
    }
    return static_cast<double>(sum);
}

namespace wright_detail {

// Psi(w) as the Laplace integral of the mixing density,
//   Psi(w) = Int_0^inf e^{w r} H(r) dr,
// evaluated by quadrature with the variable scaled so the exponential decay
// sits at unit scale. This is the route for complex arguments with strongly
// negative real part, where the alternating series has no digits left and
// the vertical-contour route only covers the real axis.
inline std::complex<double> psi_laplace_integral(const ValidatedFamily& fam,
                                                 std::complex<double> w, double rtol) {
    if (!fam.entire || fam.white_noise) {
        throw unsupported_error(
            "family_psi: Laplace-integral fallback needs a non-degenerate entire family");
    }
    const ContourTable& table = mixing_table(fam);
    const double sigma = std::max(1.0, -w.real());
    const std::complex<double> ws = w / sigma;
    auto integrand = [&](double t) -> std::complex<double> {
        const double r = t / sigma;
        if (r > table.z_hi()) return 0.0;
        const double hval = r < table.z_lo() ? table(table.z_lo()) : table(r);
        return std::exp(ws * t) * hval;
    };
    const auto q = integrate_half_line(integrand, std::max(rtol * 0.1, 1e-12));
    return q.value / sigma;
}

}  // namespace wright_detail

// The family's Psi function (no 1/K normalization): generalized Wright
// series with both parameter lists shifted by their own scales. Entire for
// every validated family with a* < 1; equals exp for the white-noise family.
inline std::complex<double> family_psi_ex(const ValidatedFamily& fam, std::complex<double> z,
                                          double rtol, SeriesDiagnostics* diag_out) {
    using namespace wright_detail;
    if (fam.white_noise) {
        if (diag_out) *diag_out = {0, 1.0, false, true, SeriesRoute::closed_form};
        return std::exp(z);
    }
    const param_pairs numer = psi_numer(fam);
    const param_pairs denom = psi_denom(fam);
    auto outcome = series_sum(numer, denom, z, rtol);
    if (!outcome.diag.precision_warning && outcome.diag.converged) {
        if (diag_out) *diag_out = outcome.diag;
        return outcome.value;
    }
    if (is_real(z) && z.real() < 0.0) {
        const double v = gwf_via_foxh(numer, denom, -z.real(), rtol);
        outcome.diag.route = SeriesRoute::contour;
        outcome.diag.converged = true;
        if (diag_out) *diag_out = outcome.diag;
        return v;
    }
    if (z.real() < 0.0) {
        const std::complex<double> v = psi_laplace_integral(fam, z, rtol);
        outcome.diag.route = SeriesRoute::laplace_integral;
        outcome.diag.converged = true;
        if (diag_out) *diag_out = outcome.diag;
        return v;
    }
    if (!outcome.diag.converged) {
        throw convergence_error("family_psi: series did not converge within the term cap",
                                std::abs(outcome.value), outcome.diag.cancellation);
    }
    // Cancellation warning on a converged value with no better route
    // available (large positive real part cannot cancel, so reaching this
    // point is rare); surface the value with the warning attached.
    if (diag_out) *diag_out = outcome.diag;
    return outcome.value;
}

inline std::complex<double> family_psi(const ValidatedFamily& fam, std::complex<double> z,
                                       double rtol = 1e-8) {
    return family_psi_ex(fam, z, rtol, nullptr);
}

}  // namespace gwright
