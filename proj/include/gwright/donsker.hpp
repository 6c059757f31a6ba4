#pragma once

// Donsker's delta of the coordinate process <., eta>: its T-transform, the
// generalized expectation, the delta at an arbitrary point, and the
// integrability bound certifying that the defining integral converges.
//
// Vectors enter every formula only through three pairing scalars, so the
// API takes those directly; a helper computes them from coordinates.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "gwright/errors.hpp"
#include "gwright/foxh.hpp"
#include "gwright/quadrature.hpp"
#include "gwright/wright.hpp"

namespace gwright {

struct PairingData {
    double eta_eta = 1.0;                    // <eta, eta>, positive
    std::complex<double> phi_phi = 0.0;      // <phi, phi>, bilinear
    std::complex<double> eta_phi = 0.0;      // <eta, phi>, bilinear
};

// Pairings from explicit coordinates, phi = phi_re + i phi_im (bilinear, no
// conjugation). For real phi a Cauchy-Schwarz violation means the inputs
// cannot be pairings of actual vectors.
inline PairingData pairing_from_vectors(const std::vector<double>& eta,
                                        const std::vector<double>& phi_re,
                                        const std::vector<double>& phi_im) {
    if (eta.size() != phi_re.size() || eta.size() != phi_im.size()) {
        throw argument_error("pairing_from_vectors: dimension mismatch");
    }
    auto dot = [](const std::vector<double>& u, const std::vector<double>& v) {
        double s = 0.0;
        for (size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
        return s;
    };
    PairingData pd;
    pd.eta_eta = dot(eta, eta);
    if (!(pd.eta_eta > 0.0)) throw argument_error("pairing_from_vectors: eta must be nonzero");
    pd.phi_phi = std::complex<double>(dot(phi_re, phi_re) - dot(phi_im, phi_im),
                                      2.0 * dot(phi_re, phi_im));
    pd.eta_phi = std::complex<double>(dot(eta, phi_re), dot(eta, phi_im));
    return pd;
}

inline void validate_pairing(const PairingData& pd) {
    if (!(pd.eta_eta > 0.0)) throw argument_error("pairing: eta_eta must be positive");
    const bool phi_real = pd.phi_phi.imag() == 0.0 && pd.eta_phi.imag() == 0.0;
    if (phi_real) {
        const double lhs = pd.eta_phi.real() * pd.eta_phi.real();
        const double rhs = pd.eta_eta * pd.phi_phi.real();
        if (lhs > rhs * (1.0 + 1e-12) + 1e-300) {
            throw argument_error("pairing: Cauchy-Schwarz violated for real phi (" +
                                 std::to_string(lhs) + " > " + std::to_string(rhs) + ")");
        }
    }
}

// Hypothesis for every operation here: 2 b_j + beta_j > 0 for all j, and
// the family entire.
inline bool check_donsker_params(const ValidatedFamily& fam) {
    for (const auto& [b, beta] : fam.lower) {
        if (!(2.0 * b + beta > 0.0)) return false;
    }
    return fam.entire;
}

namespace donsker_detail {

inline void require_params(const ValidatedFamily& fam, const char* who) {
    if (!check_donsker_params(fam)) {
        throw argument_error(std::string(who) +
                             ": family fails 2b_j + beta_j > 0 or is not entire");
    }
}

// Half-shifted series parameter lists (b_j + beta_j/2, beta_j),
// (a_i + alpha_i/2, alpha_i).
inline param_pairs half_numer(const ValidatedFamily& fam) {
    param_pairs out;
    for (const auto& [b, beta] : fam.lower) out.emplace_back(b + 0.5 * beta, beta);
    return out;
}

inline param_pairs half_denom(const ValidatedFamily& fam) {
    param_pairs out;
    for (const auto& [a, alpha] : fam.upper) out.emplace_back(a + 0.5 * alpha, alpha);
    return out;
}

}  // namespace donsker_detail

// T-transform of delta_0(<., eta>) at test function phi:
//   (1 / (K sqrt(2 pi <eta,eta>))) sum_k [prod Gamma(b_j + beta_j (1/2 + k))
//     / prod Gamma(a_i + alpha_i (1/2 + k))] (-z)^k / k!
// with z = (phi_phi - eta_phi^2 / eta_eta) / 2.
inline std::complex<double> donsker_t_transform(const ValidatedFamily& fam,
                                                const PairingData& pd, double rtol = 1e-10) {
    donsker_detail::require_params(fam, "donsker_t_transform");
    validate_pairing(pd);
    const std::complex<double> z =
        0.5 * (pd.phi_phi - pd.eta_phi * pd.eta_phi / pd.eta_eta);
    const double pref = 1.0 / (fam.K * std::sqrt(2.0 * M_PI * pd.eta_eta));
    const std::complex<double> series =
        gwf(donsker_detail::half_numer(fam), donsker_detail::half_denom(fam), -z, rtol);
    return pref * series;
}

// Generalized expectation: the T-transform at phi = 0, in closed form
//   (1 / (K sqrt(2 pi <eta,eta>))) prod Gamma(b_j + beta_j/2) /
//   prod Gamma(a_i + alpha_i/2).
inline double donsker_expectation(const ValidatedFamily& fam, double eta_eta) {
    donsker_detail::require_params(fam, "donsker_expectation");
    if (!(eta_eta > 0.0)) throw argument_error("donsker_expectation: eta_eta must be positive");
    double log_v = -fam.log_K - 0.5 * std::log(2.0 * M_PI * eta_eta);
    double sign = 1.0;
    for (const auto& [b, beta] : fam.lower) {
        const auto g = log_abs_gamma(b + 0.5 * beta);
        log_v += g.log_abs;
        sign *= g.sign;
    }
    for (const auto& [a, alpha] : fam.upper) {
        const auto g = log_abs_gamma(a + 0.5 * alpha);
        log_v -= g.log_abs;
        sign *= g.sign;
    }
    return sign * std::exp(log_v);
}

// Expectation of delta_a(<., eta>) through the mixture quadrature
//   (1 / (K sqrt(2 pi <eta,eta>))) Int_0^inf H(r) r^{-1/2}
//       exp(-a^2 / (2 r <eta,eta>)) dr,
// with r = v^2 regularizing the origin. For unit eta this is the density of
// the one-dimensional measure at a.
inline double donsker_at_a(const ValidatedFamily& fam, double eta_eta, double a,
                           double rtol = 1e-8) {
    donsker_detail::require_params(fam, "donsker_at_a");
    if (!(eta_eta > 0.0)) throw argument_error("donsker_at_a: eta_eta must be positive");
    const double pref = 1.0 / (fam.K * std::sqrt(2.0 * M_PI * eta_eta));
    if (fam.white_noise) {
        return pref * std::exp(-0.5 * a * a / eta_eta);
    }
    const ContourTable& table = mixing_table(fam);
    const double v_hi = std::sqrt(table.z_hi());
    const double aa = a * a / eta_eta;
    auto integrand = [&](double v) -> double {
        if (v <= 0.0) return 0.0;
        const double h = table(std::max(v * v, table.z_lo()));
        if (h == 0.0) return 0.0;
        const double e = aa > 0.0 ? std::exp(-0.5 * aa / (v * v)) : 1.0;
        return h * e;
    };
    const double integral = integrate(integrand, 0.0, v_hi, rtol).value;
    return pref * 2.0 * integral;
}

// Cross-check route for the same quantity: single contour evaluation of the
// half-shifted H^{m+1,0}_{p,m+1} at a^2/(2 <eta,eta>); needs a != 0.
inline double donsker_at_a_foxh(const ValidatedFamily& fam, double eta_eta, double a,
                                double rtol = 1e-8) {
    donsker_detail::require_params(fam, "donsker_at_a");
    if (!(eta_eta > 0.0)) throw argument_error("donsker_at_a: eta_eta must be positive");
    const double pref = 1.0 / (fam.K * std::sqrt(2.0 * M_PI * eta_eta));
    if (fam.white_noise) return pref * std::exp(-0.5 * a * a / eta_eta);
    if (!(a != 0.0)) throw argument_error("donsker_at_a (contour route): a must be nonzero");
    FoxHParams h;
    h.m = fam.m() + 1;
    h.n = 0;
    for (const auto& [av, alpha] : fam.upper) h.upper.emplace_back(av + 0.5 * alpha, alpha);
    h.lower.emplace_back(0.0, 1.0);
    for (const auto& [b, beta] : fam.lower) h.lower.emplace_back(b + 0.5 * beta, beta);
    FoxHOptions opt;
    opt.rtol = rtol;
    return pref * foxh_eval(h, 0.5 * a * a / eta_eta, opt);
}

// Upper bound sqrt(2 pi / <eta,eta>) Int_0^inf H(r) r^{-1/2} e^{M^2 r / 2} dr
// for the integral of |Psi(-z(x, eta, phi))| over x, valid for every phi
// with |phi| <= M. Finite because the density's tail decays like
// exp(-c r^{1/a*}) with 1/a* > 1.
inline double integrability_bound(const ValidatedFamily& fam, double M, double eta_eta,
                                  double rtol = 1e-8) {
    donsker_detail::require_params(fam, "integrability_bound");
    if (!(eta_eta > 0.0) || !(M > 0.0)) {
        throw argument_error("integrability_bound: M and eta_eta must be positive");
    }
    const double pref = std::sqrt(2.0 * M_PI / eta_eta);
    if (fam.white_noise) {
        return pref * std::exp(0.5 * M * M);
    }
    const ContourTable& table = mixing_table(fam);
    // Deep-tail table entries are interpolation noise near 1e-12 of the
    // peak, and the e^{M^2 r / 2} weight amplifies that noise ahead of the
    // true integrand. One log-spaced scan finds the peak and the last r
    // where the table is still above the noise; the integral is truncated
    // there and closed with a decay majorant, provided the weight's growth
    // is actually dominated by the measured density decay.
    constexpr int scan_n = 160;
    double zs[scan_n], hs[scan_n], peak = 0.0;
    for (int i = 0; i < scan_n; ++i) {
        zs[i] = table.z_lo() * std::pow(table.z_hi() / table.z_lo(), i / (scan_n - 1.0));
        hs[i] = table(zs[i]);
        peak = std::max(peak, hs[i]);
    }
    const double density_floor = 3e-12 * peak;
    int cut = -1, before = -1;
    for (int i = 0; i < scan_n; ++i) {
        if (hs[i] > density_floor) {
            before = cut;
            cut = i;
        }
    }
    if (cut < 0 || before < 0) {
        throw state_error("integrability_bound: degenerate mixing table");
    }
    const double z_cut = zs[cut];
    // Secant slope of -log h at the trust boundary; the class densities are
    // log-concave out here, so the true decay beyond z_cut is at least this.
    const double decay = std::log(hs[before] / hs[cut]) / (z_cut - zs[before]);
    if (!(decay > 0.5 * M * M)) {
        throw convergence_error(
            "integrability_bound: mixing table cannot resolve the e^{M^2 r/2} weight at this M",
            M, std::sqrt(2.0 * decay));
    }
    const double v_cut = std::sqrt(z_cut);
    auto integrand = [&](double v) -> double {
        if (v <= 0.0) return 0.0;
        const double h = table(std::max(v * v, table.z_lo()));
        return h > 0.0 ? h * std::exp(0.5 * M * M * v * v) : 0.0;
    };
    double integral = integrate(integrand, 0.0, v_cut, rtol).value;
    // Tail majorant: h(r) <= h(z_cut) e^{-decay (r - z_cut)} for r > z_cut.
    integral += integrand(v_cut) / (2.0 * (decay - 0.5 * M * M) * v_cut);
    const double bound = pref * 2.0 * integral;
    if (!std::isfinite(bound)) {
        throw convergence_error("integrability_bound: bound not finite at this M", bound, 0.0);
    }
    return bound;
}

// The left side the bound controls: Int_R |Psi(-z(x))| dx with
// z(x) = x^2 eta_eta / 2 + phi_phi / 2 + x eta_phi, for real phi pairings.
// Exposed for direct comparison against integrability_bound.
inline double donsker_integral_lhs(const ValidatedFamily& fam, const PairingData& pd,
                                   double rtol = 1e-7) {
    donsker_detail::require_params(fam, "donsker_integral_lhs");
    validate_pairing(pd);
    if (pd.phi_phi.imag() != 0.0 || pd.eta_phi.imag() != 0.0) {
        throw unsupported_error("donsker_integral_lhs: real phi pairings only");
    }
    const double pp = pd.phi_phi.real(), ep = pd.eta_phi.real(), ee = pd.eta_eta;
    auto integrand = [&](double x) -> double {
        const double z = 0.5 * x * x * ee + 0.5 * pp + x * ep;
        const std::complex<double> v = family_psi(fam, -z, rtol);
        return std::abs(v);
    };
    return integrate_real_line(integrand, rtol).value;
}

}  // namespace gwright
