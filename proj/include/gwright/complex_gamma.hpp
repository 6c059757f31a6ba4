#pragma once

// Principal-branch log-gamma on the complex plane.
//
// The value returned is the analytic continuation of log Gamma from the
// positive real axis (so the imaginary part is NOT wrapped into (-pi, pi]).
// Strategy: Stirling's series where it is safe (Re z > 7 or |Im z| > 7),
// upward recurrence into that region for moderate arguments, Taylor series
// around the zeros at z = 1 and z = 2, and the reflection formula for
// Re z < 0.1 with an explicit branch correction.

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>

#include "gwright/errors.hpp"

namespace gwright {

using complex_t = std::complex<double>;

namespace detail {

// sin(pi x) with argument reduction on x itself, so large arguments do not
// lose the digits that plain sin(pi * x) would.
inline double sinpi(double x) {
    double r = std::fmod(x, 2.0);  // r in (-2, 2), exact
    if (r < -1.0) r += 2.0;
    else if (r > 1.0) r -= 2.0;
    // r in [-1, 1]; fold into [-0.5, 0.5] where sin(pi r) is well conditioned
    if (r > 0.5) r = 1.0 - r;
    else if (r < -0.5) r = -1.0 - r;
    return std::sin(M_PI * r);
}

// Stirling coefficients B_{2n} / (2n (2n-1)) for n = 1..16.
inline constexpr double kStirling[16] = {
    8.3333333333333333333e-02,  -2.7777777777777777778e-03,
    7.9365079365079365079e-04,  -5.9523809523809523810e-04,
    8.4175084175084175084e-04,  -1.9175269175269175269e-03,
    6.4102564102564102564e-03,  -2.9550653594771241830e-02,
    1.7964437236883057316e-01,  -1.3924322169059011164e+00,
    1.3402864044168391994e+01,  -1.5684828462600201731e+02,
    2.1931033333333333333e+03,  -3.6108771253724989357e+04,
    6.9147226885131306710e+05,  -1.5238221539407416192e+07,
};

// Stirling asymptotic series; reliable for Re z > 7 or |Im z| > 7.
inline complex_t log_gamma_stirling(const complex_t& z) {
    const complex_t rz = 1.0 / z;
    const complex_t rzz = rz * rz;
    complex_t series = kStirling[15];
    for (int k = 14; k >= 0; --k) series = series * rzz + kStirling[k];
    constexpr double half_log_two_pi = 0.91893853320467274178;
    return (z - 0.5) * std::log(z) - z + half_log_two_pi + rz * series;
}

// Taylor expansions of log Gamma around its zeros; direct evaluation there
// would cancel catastrophically. Radius of use: |z - z0| < 0.1.
inline constexpr double kTaylorAt1[16] = {
    -0.577215664901532860607, 0.822467033424113218236,
    -0.400685634386531428467, 0.270580808427784547879,
    -0.207385551028673985266, 0.169557176997408189952,
    -0.14404989676884611812,  0.125509669524743042422,
    -0.111334265869564690491, 0.100099457512781808534,
    -0.0909540171458290422326, 0.0833538405461090040249,
    -0.0769325164113521914728, 0.0714329462953613360592,
    -0.0666687058824204680329, 0.062500955141213040742,
};

inline constexpr double kTaylorAt2[16] = {
    0.422784335098467139393,   0.322467033424113218236,
    -0.0673523010531980951332, 0.020580808427784547879,
    -0.00738555102867398526627, 0.00289051033074152328575,
    -0.00119275391170326097711, 0.000509669524743042422336,
    -0.000223154758453579379761, 0.0000994575127818085337146,
    -0.0000449262367381331417002, 0.0000205072127756706915532,
    -0.00000943948827526839590399, 0.00000437486678990748780418,
    -0.00000203921575380136623678, 9.55141213040741983286e-7,
};

inline complex_t eval_taylor(const double (&c)[16], const complex_t& w) {
    complex_t s = c[15];
    for (int k = 14; k >= 0; --k) s = s * w + c[k];
    return s * w;
}

}  // namespace detail

// Principal branch of log Gamma(z). Throws pole_error at the poles
// (z = 0, -1, -2, ...).
inline complex_t log_gamma(complex_t z) {
    using namespace detail;
    const double x = z.real();
    const double y = z.imag();
    const double yabs = std::fabs(y);

    if (y == 0.0 && x <= 0.0 && x == std::floor(x)) {
        throw pole_error("log_gamma: pole at z = " + std::to_string(x));
    }
    if (x > 7.0 || yabs > 7.0) {
        return log_gamma_stirling(z);
    }
    if (x < 0.1) {
        // Reflection: log Gamma(z) = log pi - log sin(pi z) - log Gamma(1-z),
        // where log sin must stay on the continuation branch. For Im z >= 0,
        //   log sin(pi z) = -i pi z + i pi/2 - log 2 + log(1 - e^{2 pi i z}),
        // which is analytic off the integers and real on (0, 1); the last
        // log is principal since |e^{2 pi i z}| <= 1 there. Im z < 0 goes
        // through conjugate symmetry.
        if (y < 0.0) {
            return std::conj(log_gamma(std::conj(z)));
        }
        constexpr double log_pi = 1.1447298858494001741;
        constexpr double two_pi = 6.2831853071795864769;
        const double xr = x - std::floor(x);  // e^{2 pi i z} is 1-periodic in x
        const complex_t log_sin = complex_t(M_PI * y, -M_PI * x) +
                                  complex_t(-M_LN2, 0.5 * M_PI) +
                                  std::log(1.0 - std::exp(complex_t(-two_pi * y, two_pi * xr)));
        return complex_t(log_pi, 0.0) - log_sin - log_gamma(1.0 - z);
    }
    if (std::fabs(x - 1.0) + yabs < 0.1) {
        return eval_taylor(kTaylorAt1, z - 1.0);
    }
    if (std::fabs(x - 2.0) + yabs < 0.1) {
        return eval_taylor(kTaylorAt2, z - 2.0);
    }

    // Shift z up until Stirling applies:
    //   log Gamma(z) = log Gamma(z + n) - sum_k Log(z + k).
    // The product of the shift factors is tracked with the imaginary part
    // taken positive; sign flips of its imaginary part count branch
    // crossings of the running product, and the shift is conjugated back at
    // the end if Im z < 0.
    complex_t shiftprod(x, yabs);
    double xs = x + 1.0;
    bool sb = false;
    int signflips = 0;
    while (xs <= 7.0) {
        shiftprod *= complex_t(xs, yabs);
        const bool sbp = std::signbit(shiftprod.imag());
        if (sbp && !sb) ++signflips;
        sb = sbp;
        xs += 1.0;
    }
    // Each observed entry of the running product into the lower half-plane
    // is one wrap of its accumulated argument past pi, where the principal
    // log has shed a full turn; add the turns back.
    constexpr double two_pi = 6.2831853071795864769;
    complex_t shift = std::log(shiftprod) + complex_t(0.0, signflips * two_pi);
    if (std::signbit(y)) shift = std::conj(shift);
    return log_gamma_stirling(complex_t(xs, y)) - shift;
}

// log |Gamma(x)| together with the sign of Gamma(x) for real x. Used by the
// series evaluators, whose gamma arguments can land left of zero between
// poles. Throws pole_error on the poles.
struct SignedLogGamma {
    double log_abs;
    int sign;  // +1 or -1
};

inline SignedLogGamma log_abs_gamma(double x) {
    if (x > 0.0) {
        return {std::lgamma(x), +1};
    }
    if (x == std::floor(x)) {
        throw pole_error("log_abs_gamma: pole at x = " + std::to_string(x));
    }
    // Reflection through |Gamma(x)| = pi / (|sin(pi x)| Gamma(1-x)).
    const double s = detail::sinpi(x);
    const double log_abs = std::log(M_PI / std::fabs(s)) - std::lgamma(1.0 - x);
    return {log_abs, s > 0.0 ? +1 : -1};
}

// Same in extended precision, for compensated series accumulation.
struct SignedLogGammaL {
    long double log_abs;
    int sign;
};

inline SignedLogGammaL log_abs_gamma_l(long double x) {
    if (x > 0.0L) {
        return {std::lgamma(x), +1};
    }
    if (x == std::floor(x)) {
        throw pole_error("log_abs_gamma_l: pole at x = " + std::to_string((double)x));
    }
    const long double r = std::fmod(x, 2.0L);  // sin(pi x) sign and magnitude via reduction
    long double rr = r;
    if (rr < -1.0L) rr += 2.0L;
    else if (rr > 1.0L) rr -= 2.0L;
    if (rr > 0.5L) rr = 1.0L - rr;
    else if (rr < -0.5L) rr = -1.0L - rr;
    const long double s = std::sin((long double)M_PI * rr);
    const long double log_abs =
        std::log((long double)M_PI / std::fabs(s)) - std::lgamma(1.0L - x);
    return {log_abs, s > 0.0L ? +1 : -1};
}

}  // namespace gwright
