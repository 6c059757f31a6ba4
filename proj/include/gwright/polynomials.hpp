#pragma once

// Families of monic polynomials attached to a measure: the mixing-averaged
// Hermite family with explicit coefficients, its exponential generating
// function, and Gram-Schmidt orthogonal polynomials built from the moment
// sequence through the symmetric three-term recurrence.

#include <cmath>
#include <complex>
#include <ostream>
#include <string>
#include <vector>

#include "gwright/errors.hpp"
#include "gwright/fhdam.hpp"
#include "gwright/measure.hpp"
#include "gwright/wright.hpp"

namespace gwright {

struct PolyCoeffs {
    std::vector<double> coeffs;  // ascending degree; coeffs.size() == degree + 1
    int degree = 0;

    double eval(double x) const {
        double v = 0.0;
        for (size_t i = coeffs.size(); i-- > 0;) v = v * x + coeffs[i];
        return v;
    }
};

// Coefficient of x^{n-2k} is (-1)^k mixing_moment(k) C(n,2k) (2k-1)!!,
// k = 0..floor(n/2); the k = 0 term makes the polynomial monic. For the
// white-noise family this is exactly the (probabilists') Hermite polynomial.
inline PolyCoeffs fox_hermite(const ValidatedFamily& fam, int n) {
    if (n < 0) throw argument_error("fox_hermite: degree must be >= 0");
    PolyCoeffs p;
    p.degree = n;
    p.coeffs.assign(n + 1, 0.0);
    const FHDensity rho = fh_density(fam);
    long double binom = 1.0L;      // C(n, 2k)
    long double dblfac = 1.0L;     // (2k-1)!!
    double sign = 1.0;
    for (int k = 0; 2 * k <= n; ++k) {
        if (k > 0) {
            binom *= (long double)(n - 2 * k + 2) * (n - 2 * k + 1) / ((2 * k - 1) * (2 * k));
            dblfac *= 2 * k - 1;
            sign = -sign;
        }
        const double mom = fh_moment(rho, k);
        p.coeffs[n - 2 * k] = sign * mom * static_cast<double>(binom * dblfac);
    }
    return p;
}

// Coefficient-level derivative.
inline PolyCoeffs poly_derivative(const PolyCoeffs& p) {
    PolyCoeffs d;
    d.degree = p.degree > 0 ? p.degree - 1 : 0;
    d.coeffs.assign(d.degree + 1, 0.0);
    for (int i = 1; i <= p.degree; ++i) d.coeffs[i - 1] = i * p.coeffs[i];
    return d;
}

struct GenFnPair {
    double partial_sum;
    double closed_form;
};

// Exponential generating function: partial sum sum_{n<=N} t^n F_n(x)/n!
// against the closed form e^{tx} (1/K) Psi(-t^2/2).
inline GenFnPair fox_hermite_gen(const ValidatedFamily& fam, double x, double t, int N,
                                 double rtol = 1e-10) {
    if (N < 0) throw argument_error("fox_hermite_gen: N must be >= 0");
    long double sum = 0.0L, tn = 1.0L;
    for (int n = 0; n <= N; ++n) {
        if (n > 0) tn *= t / n;
        sum += tn * (long double)fox_hermite(fam, n).eval(x);
    }
    const std::complex<double> psi = family_psi(fam, -0.5 * t * t, rtol);
    return GenFnPair{static_cast<double>(sum), std::exp(t * x) * psi.real() / fam.K};
}

// Monic orthogonal polynomial of degree n in L^2 of the one-dimensional
// measure. The measure is symmetric, so the three-term recurrence
// p_{k+1} = x p_k - c_k p_{k-1} has no x-shift and c_k is a ratio of
// consecutive squared norms; norms come from the closed-form moments.
inline PolyCoeffs gram_schmidt_orthopoly(const GWMeasure& mu, int n) {
    if (mu.d != 1) throw argument_error("gram_schmidt_orthopoly: measure must have d = 1");
    if (n < 0) throw argument_error("gram_schmidt_orthopoly: degree must be >= 0");

    // Even raw moments M_{2l}; odd moments vanish.
    std::vector<long double> even_mom(n + 1);
    for (int l = 0; l <= n; ++l) {
        even_mom[l] = mixed_moment(mu, MultiIndex({2 * l}));
    }
    auto raw_moment = [&](int order) -> long double {
        return order % 2 ? 0.0L : even_mom[order / 2];
    };

    auto norm_sq = [&](const std::vector<long double>& c, long double* abs_acc) -> long double {
        long double s = 0.0L, as = 0.0L;
        for (size_t i = 0; i < c.size(); ++i) {
            for (size_t j = 0; j < c.size(); ++j) {
                const long double term = c[i] * c[j] * raw_moment(static_cast<int>(i + j));
                s += term;
                as += std::fabs((double)term);
            }
        }
        *abs_acc = as;
        return s;
    };

    std::vector<long double> prev = {1.0L};
    if (n == 0) return PolyCoeffs{{1.0}, 0};
    std::vector<long double> cur = {0.0L, 1.0L};
    long double abs_acc = 0.0L;
    long double prev_nsq = 1.0L;
    for (int k = 1; k < n; ++k) {
        const long double cur_nsq = norm_sq(cur, &abs_acc);
        if (!(cur_nsq > 1e-13L * std::max(abs_acc, 1.0L))) {
            throw conditioning_error(
                "gram_schmidt_orthopoly: moment matrix numerically singular at degree " +
                std::to_string(k));
        }
        const long double ck = cur_nsq / prev_nsq;
        std::vector<long double> next(k + 2, 0.0L);
        for (size_t i = 0; i < cur.size(); ++i) next[i + 1] = cur[i];
        for (size_t i = 0; i < prev.size(); ++i) next[i] -= ck * prev[i];
        prev_nsq = cur_nsq;
        prev.swap(cur);
        cur.swap(next);
    }
    PolyCoeffs p;
    p.degree = n;
    p.coeffs.assign(n + 1, 0.0);
    for (int i = 0; i <= n; ++i) p.coeffs[i] = static_cast<double>(cur[i]);
    return p;
}

// JSON array of coefficients, ascending degree.
inline void export_poly_json(const PolyCoeffs& p, std::ostream& os) {
    os << "[";
    char buf[64];
    for (size_t i = 0; i < p.coeffs.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", p.coeffs[i]);
        os << (i ? "," : "") << buf;
    }
    os << "]";
}

}  // namespace gwright
