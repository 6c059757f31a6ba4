#pragma once

// Mellin-Barnes evaluation of Fox H functions on the positive axis.
//
// The kernel is assembled in log space from principal-branch log-gamma
// values and integrated along the vertical contour Re s = gamma. The
// truncation half-length T starts from the analytic envelope decay
// exp(-pi a* |t| / 2) and doubles until the bound on the discarded tail is
// below tolerance; panels refine by doubling until two levels agree. Panel
// width is capped at pi / (4 max(1, |ln z|)) so the z^{-s} oscillation stays
// resolved.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gwright/complex_gamma.hpp"
#include "gwright/errors.hpp"
#include "gwright/quadrature.hpp"

namespace gwright {

using param_pairs = std::vector<std::pair<double, double>>;  // (value, scale>0)

// Parameters of H^{m,n}_{p,q}[z | (a_i, alpha_i)_{1,p}; (b_j, beta_j)_{1,q}].
struct FoxHParams {
    int m = 0;
    int n = 0;
    param_pairs upper;  // (a_i, alpha_i), size p
    param_pairs lower;  // (b_j, beta_j), size q

    int p() const { return static_cast<int>(upper.size()); }
    int q() const { return static_cast<int>(lower.size()); }
};

namespace foxh_detail {

inline void check_params(const FoxHParams& h) {
    if (h.m < 0 || h.n < 0 || h.m > h.q() || h.n > h.p()) {
        throw argument_error("foxh: require 0 <= m <= q and 0 <= n <= p");
    }
    for (const auto& [a, alpha] : h.upper) {
        (void)a;
        if (!(alpha > 0.0)) throw argument_error("foxh: upper scale must be positive");
    }
    for (const auto& [b, beta] : h.lower) {
        (void)b;
        if (!(beta > 0.0)) throw argument_error("foxh: lower scale must be positive");
    }
}

inline bool is_nonpositive_integer(double x) {
    return x <= 0.0 && x == std::floor(x);
}

}  // namespace foxh_detail

// Contour decay exponent a* = sum_{j<=m} beta_j + sum_{i<=n} alpha_i
//                           - sum_{j>m} beta_j - sum_{i>n} alpha_i.
inline double foxh_a_star(const FoxHParams& h) {
    double s = 0.0;
    for (int j = 0; j < h.q(); ++j) s += (j < h.m ? 1.0 : -1.0) * h.lower[j].second;
    for (int i = 0; i < h.p(); ++i) s += (i < h.n ? 1.0 : -1.0) * h.upper[i].second;
    return s;
}

// Admissible contour interval: gamma must lie right of every pole of the
// numerator factors Gamma(b_j + s beta_j), j <= m, and left of every pole of
// Gamma(1 - a_i - s alpha_i), i <= n.
inline std::pair<double, double> contour_interval(const FoxHParams& h) {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (int j = 0; j < h.m; ++j) {
        lo = std::max(lo, -h.lower[j].first / h.lower[j].second);
    }
    for (int i = 0; i < h.n; ++i) {
        hi = std::min(hi, (1.0 - h.upper[i].first) / h.upper[i].second);
    }
    return {lo, hi};
}

// Default contour position: 0.5 when it sits comfortably inside the
// admissible interval, otherwise moved toward the interval midpoint.
inline double default_contour(const FoxHParams& h) {
    auto [lo, hi] = contour_interval(h);
    if (!(lo < hi)) {
        throw unsupported_error("foxh: contour interval is empty");
    }
    const bool lo_f = std::isfinite(lo);
    const bool hi_f = std::isfinite(hi);
    if (!lo_f && !hi_f) return 0.5;
    if (!hi_f) return lo < 0.0 ? std::max(0.5, lo + 0.5) : lo + 0.5;
    if (!lo_f) return hi > 1.0 ? std::min(0.5, hi - 0.5) : hi - 0.5;
    const double margin = std::min(0.25, 0.25 * (hi - lo));
    if (lo + margin < 0.5 && 0.5 < hi - margin) return 0.5;
    return 0.5 * (lo + hi);
}

// log of the Mellin kernel at s. Numerator-factor poles raise pole_error
// naming the factor; denominator poles send the kernel to zero, signalled
// here with -infinity real part.
inline complex_t log_kernel(const FoxHParams& h, const complex_t& s) {
    using foxh_detail::is_nonpositive_integer;
    complex_t acc = 0.0;
    for (int j = 0; j < h.q(); ++j) {
        const auto& [b, beta] = h.lower[j];
        if (j < h.m) {
            const complex_t arg = b + s * beta;
            if (arg.imag() == 0.0 && is_nonpositive_integer(arg.real())) {
                throw pole_error("foxh kernel: pole of numerator factor Gamma(b_" +
                                 std::to_string(j + 1) + " + s beta_" + std::to_string(j + 1) +
                                 ") at s = " + std::to_string(s.real()));
            }
            acc += log_gamma(arg);
        } else {
            const complex_t arg = 1.0 - b - s * beta;
            if (arg.imag() == 0.0 && is_nonpositive_integer(arg.real())) {
                return {-std::numeric_limits<double>::infinity(), 0.0};
            }
            acc -= log_gamma(arg);
        }
    }
    for (int i = 0; i < h.p(); ++i) {
        const auto& [a, alpha] = h.upper[i];
        if (i < h.n) {
            const complex_t arg = 1.0 - a - s * alpha;
            if (arg.imag() == 0.0 && is_nonpositive_integer(arg.real())) {
                throw pole_error("foxh kernel: pole of numerator factor Gamma(1 - a_" +
                                 std::to_string(i + 1) + " - s alpha_" + std::to_string(i + 1) +
                                 ") at s = " + std::to_string(s.real()));
            }
            acc += log_gamma(arg);
        } else {
            const complex_t arg = a + s * alpha;
            if (arg.imag() == 0.0 && is_nonpositive_integer(arg.real())) {
                return {-std::numeric_limits<double>::infinity(), 0.0};
            }
            acc -= log_gamma(arg);
        }
    }
    return acc;
}

// Kernel value itself; zero where a denominator factor sits on a pole.
inline complex_t kernel(const FoxHParams& h, const complex_t& s) {
    foxh_detail::check_params(h);
    const complex_t lk = log_kernel(h, s);
    if (lk.real() == -std::numeric_limits<double>::infinity()) return 0.0;
    return std::exp(lk);
}

struct FoxHOptions {
    double rtol = 1e-9;
    // Absolute floor for convergence acceptance. Deep in a density tail the
    // contour integral cancels to essentially zero and no relative target
    // can be met; callers that probe tails set this to a small multiple of
    // the scale they care about.
    double atol = 0.0;
    // Contour abscissa; NaN selects default_contour().
    double gamma = std::numeric_limits<double>::quiet_NaN();
};

struct FoxHResult {
    double value = 0.0;
    double imag_residual = 0.0;  // |Im integral| / max(|Re integral|, tiny)
    double tail_bound = 0.0;     // envelope bound on the truncated |t| > T part
    double T = 0.0;
    int kernel_evals = 0;
    double gamma = 0.0;
};

namespace foxh_detail {

// One composite pass over [-T, T] with the given panel count.
inline complex_t contour_pass(const FoxHParams& h, double gamma, double log_z, double T,
                              int panels, int* evals) {
    using gwright::detail::kGL15Node;
    using gwright::detail::kGL15Weight;
    const double hstep = 2.0 * T / panels;
    complex_t total = 0.0;
    auto integrand = [&](double t) {
        const complex_t s(gamma, t);
        const complex_t lk = log_kernel(h, s);
        ++*evals;
        if (!std::isfinite(lk.real())) return complex_t(0.0, 0.0);
        // kernel(s) * z^{-s} = exp(lk - s ln z)
        return std::exp(lk - s * log_z);
    };
    for (int pnl = 0; pnl < panels; ++pnl) {
        const double mid = -T + (pnl + 0.5) * hstep;
        const double half = 0.5 * hstep;
        complex_t acc = integrand(mid) * kGL15Weight[0];
        for (int i = 1; i < 8; ++i) {
            const double dt = half * kGL15Node[i];
            acc += (integrand(mid - dt) + integrand(mid + dt)) * kGL15Weight[i];
        }
        total += acc * half;
    }
    return total;
}

}  // namespace foxh_detail

// Evaluate H(z) for z > 0 along the vertical contour, with diagnostics.
inline FoxHResult foxh_eval_ex(const FoxHParams& h, double z, const FoxHOptions& opt = {}) {
    foxh_detail::check_params(h);
    if (!(z > 0.0)) throw argument_error("foxh_eval: argument must be positive");
    const double a_star = foxh_a_star(h);
    if (!(a_star > 0.0)) {
        throw unsupported_error(
            "foxh_eval: contour integrand does not decay (a* = " + std::to_string(a_star) +
            " <= 0)");
    }
    const double rtol = opt.rtol;
    const double gamma = std::isnan(opt.gamma) ? default_contour(h) : opt.gamma;
    {
        auto [lo, hi] = contour_interval(h);
        if (!(lo < gamma && gamma < hi)) {
            throw argument_error("foxh_eval: contour gamma = " + std::to_string(gamma) +
                                 " outside the admissible interval");
        }
    }

    const double log_z = std::log(z);
    const double decay = 0.5 * M_PI * a_star;
    double T = std::max(8.0, std::log(10.0 / rtol) / decay);
    const double width = std::min(0.5, M_PI / (4.0 * std::max(1.0, std::fabs(log_z))));

    // Scale of the integrand at the contour center; used for the rounding
    // floor (the quadrature cannot resolve differences below roundoff of the
    // magnitudes it sums) and, scaled by atol, for tail acceptance.
    const double scale0 = std::exp(log_kernel(h, complex_t(gamma, 0.0)).real() - gamma * log_z);
    const double round_floor = 4e-15 * scale0 * std::max(2.0 * T, 2.0 / decay);

    int evals = 0;
    complex_t integral = 0.0;
    double tail = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int t_round = 0; t_round < 7 && !converged; ++t_round) {
        int panels = std::max(4, static_cast<int>(std::ceil(2.0 * T / width)));
        complex_t prev = foxh_detail::contour_pass(h, gamma, log_z, T, panels, &evals);
        bool panel_ok = false;
        for (int round = 0; round < 6; ++round) {
            panels *= 2;
            const complex_t cur = foxh_detail::contour_pass(h, gamma, log_z, T, panels, &evals);
            const double diff = std::abs(cur - prev);
            prev = cur;
            if (diff <= 0.25 * (rtol * std::abs(cur) + opt.atol) + round_floor) {
                panel_ok = true;
                break;
            }
        }
        integral = prev;
        // Envelope bound on the discarded tail: |kernel| decays at least like
        // exp(-decay * |t|) for large |t|, so the remainder is about
        // 2 |f(T)| / decay with f the integrand at the truncation point.
        const complex_t lkT = log_kernel(h, complex_t(gamma, T));
        const double fT = std::isfinite(lkT.real())
                              ? std::exp(lkT.real() - gamma * log_z)
                              : 0.0;
        tail = 2.0 * fT / decay;
        if (panel_ok &&
            tail <= 0.5 * (rtol * std::max(std::abs(integral), 1e-300) + opt.atol)) {
            converged = true;
        } else {
            T *= 2.0;
        }
    }
    if (!converged) {
        throw convergence_error("foxh_eval: contour quadrature did not stabilize",
                                integral.real() / (2.0 * M_PI), tail);
    }

    FoxHResult out;
    out.value = integral.real() / (2.0 * M_PI);
    out.imag_residual =
        std::abs(integral.imag()) / std::max(std::abs(integral.real()), 1e-300);
    out.tail_bound = tail / (2.0 * M_PI);
    out.T = T;
    out.kernel_evals = evals;
    out.gamma = gamma;
    return out;
}

inline double foxh_eval(const FoxHParams& h, double z, const FoxHOptions& opt = {}) {
    return foxh_eval_ex(h, z, opt).value;
}

// Precomputed contour for evaluating one H at many arguments.
//
// Kernel samples along the contour are computed once; each evaluation is a
// weighted sum of z^{-s} phases over those samples, walked panel-by-panel
// with a rotating phase factor instead of a complex exponential per node.
// Build-time validation compares the table against doubled-resolution
// passes at probe arguments.
class ContourTable {
public:
    ContourTable(FoxHParams h, double z_lo, double z_hi, const FoxHOptions& opt = {})
        : h_(std::move(h)), rtol_(opt.rtol), atol_(opt.atol) {
        foxh_detail::check_params(h_);
        if (!(z_lo > 0.0 && z_hi > z_lo)) {
            throw argument_error("ContourTable: need 0 < z_lo < z_hi");
        }
        const double a_star = foxh_a_star(h_);
        if (!(a_star > 0.0)) {
            throw unsupported_error("ContourTable: contour integrand does not decay");
        }
        gamma_ = std::isnan(opt.gamma) ? default_contour(h_) : opt.gamma;
        z_lo_ = z_lo;
        z_hi_ = z_hi;

        const double decay = 0.5 * M_PI * a_star;
        const double lmax =
            std::max({1.0, std::fabs(std::log(z_lo)), std::fabs(std::log(z_hi))});
        width_cap_ = std::min(0.5, M_PI / (4.0 * lmax));
        T_ = std::max(8.0, std::log(10.0 / rtol_) / decay);

        // Size T so the envelope tail clears tolerance relative to the
        // kernel scale at the contour, then lay panels and validate against
        // direct evaluations at probe points.
        for (int round = 0; round < 7; ++round) {
            const complex_t lkT = log_kernel(h_, complex_t(gamma_, T_));
            const double scale0 = std::exp(log_kernel(h_, complex_t(gamma_, 0.0)).real());
            const double tail = std::isfinite(lkT.real())
                                    ? 2.0 * std::exp(lkT.real()) / decay
                                    : 0.0;
            if (tail <= 0.1 * rtol_ * std::max(scale0, 1e-300)) break;
            T_ *= 2.0;
        }
        build_nodes();
        validate();
    }

    const FoxHParams& params() const { return h_; }
    double gamma() const { return gamma_; }
    double z_lo() const { return z_lo_; }
    double z_hi() const { return z_hi_; }
    bool covers(double z) const { return z >= z_lo_ && z <= z_hi_; }

    // Real part of the contour integral at z; same value foxh_eval returns.
    double operator()(double z) const {
        if (!(z > 0.0)) throw argument_error("ContourTable: argument must be positive");
        const double L = std::log(z);
        // Phases e^{-i t L} walked with one rotation per panel.
        const std::complex<double> rot = std::polar(1.0, -panel_step_ * L);
        std::complex<double> phase = std::polar(1.0, -mid0_ * L);
        std::complex<double> inner[8];
        for (int i = 0; i < 8; ++i) {
            inner[i] = std::polar(1.0, -offsets_[i] * L);
        }
        std::complex<double> total = 0.0;
        const int panels = static_cast<int>(coeff_.size()) / 15;
        for (int pnl = 0; pnl < panels; ++pnl) {
            const std::complex<double>* c = &coeff_[pnl * 15];
            // Node order within a panel: center, then (-dt, +dt) pairs.
            std::complex<double> acc = c[0];
            for (int i = 1; i < 8; ++i) {
                acc += c[2 * i - 1] * std::conj(inner[i]) + c[2 * i] * inner[i];
            }
            total += acc * phase;
            phase *= rot;
            if ((pnl & 511) == 511) phase /= std::abs(phase);
        }
        return std::exp(-gamma_ * L) * total.real() / (2.0 * M_PI);
    }

private:
    void build_nodes() {
        using gwright::detail::kGL15Node;
        using gwright::detail::kGL15Weight;
        const int panels = std::max(4, static_cast<int>(std::ceil(2.0 * T_ / width_cap_)));
        panel_step_ = 2.0 * T_ / panels;
        mid0_ = -T_ + 0.5 * panel_step_;
        const double half = 0.5 * panel_step_;
        for (int i = 0; i < 8; ++i) offsets_[i] = half * kGL15Node[i];
        coeff_.clear();
        coeff_.reserve(static_cast<std::size_t>(panels) * 15);
        for (int pnl = 0; pnl < panels; ++pnl) {
            const double mid = mid0_ + pnl * panel_step_;
            auto k_at = [&](double t) -> std::complex<double> {
                const complex_t lk = log_kernel(h_, complex_t(gamma_, t));
                if (!std::isfinite(lk.real())) return 0.0;
                return std::exp(lk);
            };
            coeff_.push_back(k_at(mid) * (kGL15Weight[0] * half));
            for (int i = 1; i < 8; ++i) {
                coeff_.push_back(k_at(mid - offsets_[i]) * (kGL15Weight[i] * half));
                coeff_.push_back(k_at(mid + offsets_[i]) * (kGL15Weight[i] * half));
            }
        }
    }

    void validate() const {
        FoxHOptions opt;
        opt.rtol = rtol_;
        opt.atol = atol_;
        opt.gamma = gamma_;
        const double zm = std::sqrt(z_lo_ * z_hi_);
        double scale = 0.0;
        struct Probe { double z, direct, table; };
        std::vector<Probe> probes;
        for (double z : {z_lo_, zm, z_hi_}) {
            const double direct = foxh_eval(h_, z, opt);
            probes.push_back({z, direct, (*this)(z)});
            scale = std::max(scale, std::fabs(direct));
        }
        for (const auto& pr : probes) {
            if (std::fabs(pr.table - pr.direct) >
                50.0 * (rtol_ * std::max(scale, 1e-300) + atol_)) {
                throw convergence_error(
                    "ContourTable: probe mismatch against direct evaluation at z = " +
                        std::to_string(pr.z),
                    pr.table, std::fabs(pr.table - pr.direct));
            }
        }
    }

    FoxHParams h_;
    double rtol_;
    double atol_ = 0.0;
    double gamma_ = 0.5;
    double z_lo_ = 0.0, z_hi_ = 0.0;
    double T_ = 0.0;
    double width_cap_ = 0.5;
    double panel_step_ = 0.0;
    double mid0_ = 0.0;
    double offsets_[8] = {};
    std::vector<std::complex<double>> coeff_;
};

// Generalized Wright series by Mellin-Barnes contour: for numerator pairs
// (B_i, beta_i) and denominator pairs (A_j, alpha_j),
//   Psi(-z) = H^{1,m}_{m,p+1}[z | (1-B_i, beta_i); (0,1), (1-A_j, alpha_j)]
// for z > 0. This is the cancellation-free route for strongly negative real
// arguments of the series.
inline FoxHParams wright_contour_params(const param_pairs& numer, const param_pairs& denom) {
    FoxHParams h;
    h.m = 1;
    h.n = static_cast<int>(numer.size());
    for (const auto& [B, beta] : numer) h.upper.emplace_back(1.0 - B, beta);
    h.lower.emplace_back(0.0, 1.0);
    for (const auto& [A, alpha] : denom) h.lower.emplace_back(1.0 - A, alpha);
    return h;
}

inline double gwf_via_foxh(const param_pairs& numer, const param_pairs& denom, double z,
                           double rtol = 1e-9) {
    if (!(z > 0.0)) throw argument_error("gwf_via_foxh: argument must be positive");
    for (const auto& [B, beta] : numer) {
        if (!(B > 0.0) || !(beta > 0.0)) {
            throw unsupported_error(
                "gwf_via_foxh: numerator pairs must have positive value and scale for the "
                "contour to separate pole families");
        }
    }
    FoxHOptions opt;
    opt.rtol = rtol;
    return foxh_eval(wright_contour_params(numer, denom), z, opt);
}

}  // namespace gwright
