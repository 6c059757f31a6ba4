// Acceptance gate: nine end-to-end checks across the library surface, one
// stdout line each ("criterion N: PASS|FAIL"). Failure details and timing go
// to stderr; the exit status is the number of failed criteria.
//
// Checks 1, 2, 3 and 5 carry wall-clock budgets, measured with steady_clock,
// so performance regressions in the numerical kernels fail the gate too.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gwright/gwright.hpp>

#include "oracle_constants.hpp"
#include "reference.hpp"

namespace {

using namespace gwright;

struct Ctx {
    ValidatedFamily gauss;
    ValidatedFamily ml05;
    ValidatedFamily ml09;
};

// Collects failure notes; caps them so a broken sweep cannot flood stderr.
struct Gate {
    std::vector<std::string>* notes;
    bool ok = true;

    void expect(bool cond, const std::string& what) {
        if (cond) return;
        ok = false;
        if (notes->size() < 24) {
            notes->push_back(what);
        } else if (notes->size() == 24) {
            notes->push_back("(further failures suppressed)");
        }
    }
    void close(double got, double want, double tol, const std::string& what) {
        const double rel = std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
        if (rel <= tol) return;
        char buf[160];
        std::snprintf(buf, sizeof buf, " (got %.12g want %.12g rel %.2e tol %.2e)", got, want,
                      rel, tol);
        expect(false, what + buf);
    }
    void near(double got, double want, double tol, const std::string& what) {
        if (std::fabs(got - want) <= tol) return;
        char buf[160];
        std::snprintf(buf, sizeof buf, " (got %.12g want %.12g tol %.2e)", got, want, tol);
        expect(false, what + buf);
    }
};

// (n-1)!! for even n, used by the Gaussian moment closed forms.
double dfact_odd(int n) {
    double f = 1.0;
    for (int j = n - 1; j > 1; j -= 2) f *= j;
    return f;
}

// Independent mixing-moment closed form Gamma(l+1)/Gamma(rho l + 1) for the
// shipped one-parameter families, straight from lgamma.
double ml_mixing_moment(double rho, double l) {
    return std::exp(std::lgamma(l + 1.0) - std::lgamma(rho * l + 1.0));
}

// Reference value of the family Psi at -s (s >= 0) for the shipped families,
// computed outside the library: quad-precision series where the alternating
// cancellation leaves enough digits, the exp*erfc closed form beyond.
double psi_neg_reference(Gate& g, double rho, double s, const char* who) {
    if (rho == 0.0) return std::exp(-s);
    if (rho == 0.5 && s > 6.0) return ref::ml_half_neg_closed(s);
    const auto r = ref::ml_series(rho, -s);
    g.expect(r.converged && r.err_rel < 1e-12,
             std::string(who) + ": reference series lost certification at s=" +
                 std::to_string(s));
    return r.value;
}

// ---------------------------------------------------------------------------
// 1. White-noise reduction: every exposed quantity collapses to the standard
//    normal closed forms. All routes here are closed-form short-circuits, so
//    the tight 1e-10 tolerance applies throughout.
bool criterion1(const Ctx& cx, std::vector<std::string>& notes) {
    Gate g{&notes};
    const ValidatedFamily& fam = cx.gauss;
    const double inv_s2pi = 1.0 / std::sqrt(2.0 * M_PI);
    GWMeasure mu1 = gw_measure(fam, 1);
    GWMeasure mu2 = gw_measure(fam, 2);

    for (double y : {0.25, 0.5, 1.0, 2.0, 3.0}) {
        g.close(char_fn(mu1, {y}), std::exp(-0.5 * y * y), 1e-10, "char_fn d=1");
    }
    g.close(char_fn(mu2, {0.5, 1.0}), std::exp(-0.5 * 1.25), 1e-10, "char_fn d=2");
    g.close(char_fn(mu2, {1.5, -0.5}), std::exp(-0.5 * 2.5), 1e-10, "char_fn d=2");

    for (double x : {0.0, 0.5, 1.0, 2.0, 3.5}) {
        const double want1 = inv_s2pi * std::exp(-0.5 * x * x);
        g.close(gwm_density(mu1, {x}), want1, 1e-10, "density d=1");
        g.close(gwm_density_foxh(mu1, {x}), want1, 1e-10, "density d=1 (contour route)");
        const double want2 = std::exp(-0.5 * (x * x + 0.49)) / (2.0 * M_PI);
        g.close(gwm_density(mu2, {x, 0.7}), want2, 1e-10, "density d=2");
    }

    for (int n = 0; n <= 8; ++n) {
        const double got = mixed_moment(mu1, MultiIndex{{n}});
        if (n % 2 == 1) {
            g.near(got, 0.0, 0.0, "odd moment d=1");
        } else {
            g.close(got, dfact_odd(n), 1e-10, "even moment d=1");
        }
    }
    for (int a = 0; a <= 8; ++a) {
        for (int b = 0; a + b <= 8; ++b) {
            const double got = mixed_moment(mu2, MultiIndex{{a, b}});
            if (a % 2 == 1 || b % 2 == 1) {
                g.near(got, 0.0, 0.0, "odd mixed moment d=2");
            } else {
                g.close(got, dfact_odd(a) * dfact_odd(b), 1e-10, "mixed moment d=2");
            }
        }
    }

    for (int n = 0; n <= 8; ++n) {
        const PolyCoeffs p = fox_hermite(fam, n);
        const std::vector<double> want = ref::hermite_coeffs(n);
        g.expect(p.coeffs.size() == want.size(), "fox_hermite coefficient count");
        if (p.coeffs.size() != want.size()) continue;
        for (size_t i = 0; i < want.size(); ++i) {
            g.near(p.coeffs[i], want[i], 1e-10 * std::max(1.0, std::fabs(want[i])),
                   "fox_hermite vs Hermite n=" + std::to_string(n));
        }
    }

    g.close(donsker_expectation(fam, 1.0), inv_s2pi, 1e-10, "expectation");
    for (double a : {0.0, 0.7, 1.5}) {
        const double want = inv_s2pi * std::exp(-0.5 * a * a);
        g.close(donsker_at_a(fam, 1.0, a), want, 1e-10, "delta expectation");
        g.close(donsker_at_a_foxh(fam, 1.0, a), want, 1e-10, "delta expectation (contour)");
    }
    return g.ok;
}

// ---------------------------------------------------------------------------
// 2. One-parameter reductions rho = 0.5 and 0.9: Psi(-s) on s in [0, 10]
//    against an independent series implementation, plus the frozen
//    25-digit anchors and the rho = 1/2 exp*erfc closed form in both
//    argument conventions.
bool criterion2(const Ctx& cx, std::vector<std::string>& notes) {
    Gate g{&notes};
    for (int i = 0; i <= 100; ++i) {
        const double s = 0.1 * i;
        g.close(family_psi(cx.ml09, -s, 1e-11).real(),
                psi_neg_reference(g, 0.9, s, "rho=0.9"), 1e-10,
                "psi rho=0.9 s=" + std::to_string(s));
        g.close(family_psi(cx.ml05, -s, 1e-11).real(),
                psi_neg_reference(g, 0.5, s, "rho=0.5"), 1e-10,
                "psi rho=0.5 s=" + std::to_string(s));
    }
    for (const auto& row : oracle::kMlHalfNegGrid) {
        g.close(family_psi(cx.ml05, -row.s, 1e-11).real(), row.value, 1e-10,
                "rho=0.5 anchor s=" + std::to_string(row.s));
    }
    for (const auto& row : oracle::kMlNineNegGrid) {
        g.close(family_psi(cx.ml09, -row.s, 1e-11).real(), row.value, 1e-10,
                "rho=0.9 anchor s=" + std::to_string(row.s));
    }
    for (double s : {0.5, 1.0, 2.0, 4.0, 9.0}) {
        const double r = std::sqrt(s);
        g.close(family_psi(cx.ml05, -r, 1e-11).real(), std::exp(s) * std::erfc(r), 1e-8,
                "exp*erfc closed form, sqrt argument");
    }
    for (double s : {0.5, 1.0, 2.0, 3.0}) {
        g.close(family_psi(cx.ml05, -s, 1e-11).real(), ref::ml_half_neg_closed(s), 1e-8,
                "exp*erfc closed form, direct argument");
    }
    return g.ok;
}

// ---------------------------------------------------------------------------
// 3. Series/contour duality at z in {0.5, 1, 2, 5, 10} for the shipped
//    families. The series evaluator hands deep-cancellation points to the
//    contour itself, so the contour value is additionally certified against
//    a reference computed outside the library.
bool criterion3(const Ctx& cx, std::vector<std::string>& notes) {
    Gate g{&notes};
    struct Case {
        const ValidatedFamily* fam;
        double rho;
        const char* name;
    };
    const Case cases[] = {
        {&cx.gauss, 0.0, "white-noise"},
        {&cx.ml05, 0.5, "rho=0.5"},
        {&cx.ml09, 0.9, "rho=0.9"},
    };
    for (const auto& c : cases) {
        const param_pairs nu = psi_numer(*c.fam);
        const param_pairs de = psi_denom(*c.fam);
        for (double z : {0.5, 1.0, 2.0, 5.0, 10.0}) {
            const double contour = gwf_via_foxh(nu, de, z, 1e-10);
            const double series = gwf(nu, de, std::complex<double>(-z, 0.0), 1e-10).real();
            const std::string tag = std::string(c.name) + " z=" + std::to_string(z);
            g.close(series, contour, 1e-8, tag + " series vs contour");
            g.close(contour, psi_neg_reference(g, c.rho, z, c.name), 1e-8,
                    tag + " contour vs independent reference");
        }
    }
    return g.ok;
}

// ---------------------------------------------------------------------------
// 4. Mixing-density consistency: Gamma-ratio moments l <= 6 against direct
//    quadrature of the tabulated density, the Laplace-transform identity at
//    s in {0.1, 1, 10}, and unit normalization.
bool criterion4(const Ctx& cx, std::vector<std::string>& notes) {
    Gate g{&notes};
    struct Case {
        const ValidatedFamily* fam;
        double rho;
        const char* name;
    };
    const Case cases[] = {{&cx.ml05, 0.5, "rho=0.5"}, {&cx.ml09, 0.9, "rho=0.9"}};
    for (const auto& c : cases) {
        FHDensity den = fh_density(*c.fam);
        const ContourTable& tb = mixing_table(den.fam);
        auto quad = [&](auto f) { return integrate(f, tb.z_lo(), tb.z_hi(), 1e-8).value; };

        for (int l = 0; l <= 6; ++l) {
            const double closed = fh_moment(den, l);
            const std::string tag = std::string(c.name) + " moment l=" + std::to_string(l);
            g.close(closed, ml_mixing_moment(c.rho, l), 1e-12, tag + " Gamma-ratio form");
            const double q =
                quad([&](double t) { return std::pow(t, l) * fh_pdf(den, t); });
            g.close(q, closed, 1e-6, tag + " vs quadrature");
        }
        for (double s : {0.1, 1.0, 10.0}) {
            const double lp = fh_laplace(den, s);
            const double q =
                quad([&](double t) { return std::exp(-s * t) * fh_pdf(den, t); });
            g.close(lp, q, 1e-6,
                    std::string(c.name) + " Laplace identity s=" + std::to_string(s));
        }
        g.close(quad([&](double t) { return fh_pdf(den, t); }), 1.0, 1e-6,
                std::string(c.name) + " normalization");
    }
    return g.ok;
}

// ---------------------------------------------------------------------------
// 5. Monte Carlo validation: 10^6 draws per family and dimension; every
//    mixed moment of total order <= 4 and the characteristic function at
//    five grid points sit within the standard-error policy of the check
//    suite (5 SE here, since the suite runs more than 20 comparisons).
bool criterion5(const Ctx& cx, std::vector<std::string>& notes) {
    Gate g{&notes};
    CheckSuite suite;
    struct Case {
        const ValidatedFamily* fam;
        double rho;
        bool wn;
        const char* name;
        std::uint64_t seed;
    };
    const Case cases[] = {
        {&cx.gauss, 0.0, true, "white-noise", 811},
        {&cx.ml05, 0.5, false, "rho=0.5", 907},
        {&cx.ml09, 0.9, false, "rho=0.9", 1013},
    };
    const double ygrid[] = {0.25, 0.5, 1.0, 2.0, 3.0};
    for (const auto& c : cases) {
        FHDensity den = build_sampler(fh_density(*c.fam));
        auto mom = [&](int l) { return c.wn ? 1.0 : ml_mixing_moment(c.rho, l); };
        auto char_ref = [&](double yy) {
            return psi_neg_reference(g, c.rho, 0.5 * yy, "char reference");
        };
        for (int d : {1, 2}) {
            GWMeasure mu = gw_measure(den, d);
            const SampleMatrix s =
                sample_batch(mu, RngState::seeded(c.seed + 7 * d), 1000000);
            const std::string base = std::string(c.name) + " d=" + std::to_string(d) + " ";
            if (d == 1) {
                for (int n = 1; n <= 4; ++n) {
                    const auto e = mc_moment(s, MultiIndex{{n}});
                    const double want = (n % 2) ? 0.0 : mom(n / 2) * dfact_odd(n);
                    suite.add_mc(base + "moment " + std::to_string(n), want, e.value,
                                 e.std_error);
                }
            } else {
                for (int a = 0; a <= 4; ++a) {
                    for (int b = (a == 0 ? 1 : 0); a + b <= 4; ++b) {
                        const auto e = mc_moment(s, MultiIndex{{a, b}});
                        const double want = (a % 2 || b % 2)
                                                ? 0.0
                                                : mom((a + b) / 2) * dfact_odd(a) * dfact_odd(b);
                        suite.add_mc(base + "moment (" + std::to_string(a) + "," +
                                         std::to_string(b) + ")",
                                     want, e.value, e.std_error);
                    }
                }
            }
            const double scale = d == 1 ? 1.0 : 1.0 / std::sqrt(2.0);
            for (double y : ygrid) {
                const std::vector<double> yv =
                    d == 1 ? std::vector<double>{y} : std::vector<double>{y * scale, y * scale};
                const auto e = mc_char_fn(s, yv);
                const std::string tag = base + "char y=" + std::to_string(y);
                suite.add_mc(tag + " re", char_ref(y * y), e.value.real(), e.se_re);
                suite.add_mc(tag + " im", 0.0, e.value.imag(), e.se_im);
            }
        }
    }
    const auto items = suite.finalize();
    g.expect(items.size() > 20, "suite runs in the widened 5-SE regime");
    for (const auto& it : items) {
        if (it.pass) continue;
        char buf[200];
        std::snprintf(buf, sizeof buf, " (expected %.6g observed %.6g tolerance %.3g)",
                      it.expected, it.observed, it.tolerance);
        g.expect(false, it.name + buf);
    }
    return g.ok;
}

// ---------------------------------------------------------------------------
// 6. Density route duality in d = 1 at nine nonzero points, and refusal of
//    both routes when the density hypothesis 2(b + beta) > beta d fails,
//    which it does for every shipped non-degenerate family at d = 2.
bool criterion6(const Ctx& cx, std::vector<std::string>& notes) {
    Gate g{&notes};
    const double pts[] = {0.125, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0};
    struct Case {
        const ValidatedFamily* fam;
        const char* name;
    };
    const Case cases[] = {{&cx.ml05, "rho=0.5"}, {&cx.ml09, "rho=0.9"}};
    for (const auto& c : cases) {
        bool admissible_d1 = true, admissible_d2 = true;
        for (const auto& [b, beta] : c.fam->lower) {
            admissible_d1 = admissible_d1 && 2.0 * (b + beta) > beta * 1.0;
            admissible_d2 = admissible_d2 && 2.0 * (b + beta) > beta * 2.0;
        }
        g.expect(admissible_d1, std::string(c.name) + " satisfies the d=1 hypothesis");
        g.expect(!admissible_d2, std::string(c.name) + " violates the d=2 hypothesis");

        GWMeasure mu{fh_density(*c.fam), 1};
        for (double x : pts) {
            const double a = gwm_density(mu, {x}, 1e-8);
            const double b = gwm_density_foxh(mu, {x}, 1e-8);
            g.expect(a > 0.0, std::string(c.name) + " positive density");
            g.close(b, a, 1e-6,
                    std::string(c.name) + " route agreement x=" + std::to_string(x));
        }

        GWMeasure mu2{fh_density(*c.fam), 2};
        bool threw = false;
        try {
            gwm_density(mu2, {0.5, 0.5});
        } catch (const unsupported_error&) {
            threw = true;
        }
        g.expect(threw, std::string(c.name) + " quadrature route rejects d=2");
        threw = false;
        try {
            gwm_density_foxh(mu2, {0.5, 0.5});
        } catch (const unsupported_error&) {
            threw = true;
        }
        g.expect(threw, std::string(c.name) + " contour route rejects d=2");
    }
    return g.ok;
}

// ---------------------------------------------------------------------------
// 7. Polynomial identities: the lowering identity D F_n = n F_{n-1} in exact
//    coefficients, monotone convergence of the generating-function partial
//    sums, the degree <= 3 moment-ratio closed forms, and quadrature
//    orthogonality of the first five orthogonal polynomials.
bool criterion7(const Ctx& cx, std::vector<std::string>& notes) {
    Gate g{&notes};
    struct Case {
        const ValidatedFamily* fam;
        double rho;
        bool wn;
        const char* name;
    };
    const Case cases[] = {
        {&cx.gauss, 0.0, true, "white-noise"},
        {&cx.ml05, 0.5, false, "rho=0.5"},
        {&cx.ml09, 0.9, false, "rho=0.9"},
    };

    for (const auto& c : cases) {
        PolyCoeffs prev = fox_hermite(*c.fam, 0);
        for (int n = 1; n <= 12; ++n) {
            PolyCoeffs cur = fox_hermite(*c.fam, n);
            const PolyCoeffs der = poly_derivative(cur);
            g.expect(der.coeffs.size() == prev.coeffs.size(),
                     std::string(c.name) + " lowering identity degree bookkeeping");
            for (size_t i = 0; i < prev.coeffs.size() && i < der.coeffs.size(); ++i) {
                const double want = n * prev.coeffs[i];
                g.near(der.coeffs[i], want, 1e-12 * std::max(1.0, std::fabs(want)),
                       std::string(c.name) + " lowering identity n=" + std::to_string(n));
            }
            prev = std::move(cur);
        }
    }

    for (const auto& c : cases) {
        for (double x : {0.0, 0.5, 1.0}) {
            for (double t : {0.2, 0.5, 0.8}) {
                double prev_err = HUGE_VAL;
                double last_err = HUGE_VAL, scale = 1.0;
                for (int N : {5, 10, 20, 30}) {
                    const GenFnPair p = fox_hermite_gen(*c.fam, x, t, N, 1e-12);
                    scale = std::max(1.0, std::fabs(p.closed_form));
                    // below the round-off floor the ordering is noise
                    const double floor = 1e-13 * scale;
                    const double err = std::fabs(p.partial_sum - p.closed_form);
                    g.expect(err <= prev_err || err <= floor,
                             std::string(c.name) + " generating function non-monotone at x=" +
                                 std::to_string(x) + " t=" + std::to_string(t) +
                                 " N=" + std::to_string(N));
                    prev_err = std::max(err, floor);
                    last_err = err;
                }
                g.expect(last_err <= 1e-9 * scale,
                         std::string(c.name) + " generating function did not converge at x=" +
                             std::to_string(x) + " t=" + std::to_string(t));
            }
        }
    }

    for (const auto& c : cases) {
        GWMeasure mu{fh_density(*c.fam), 1};
        const double m2 = c.wn ? 1.0 : ml_mixing_moment(c.rho, 1);
        const double m4 = 3.0 * (c.wn ? 1.0 : ml_mixing_moment(c.rho, 2));
        const PolyCoeffs p1 = gram_schmidt_orthopoly(mu, 1);
        g.near(p1.coeffs[0], 0.0, 1e-12, std::string(c.name) + " p1 constant term");
        g.near(p1.coeffs[1], 1.0, 1e-12, std::string(c.name) + " p1 monic");
        const PolyCoeffs p2 = gram_schmidt_orthopoly(mu, 2);
        g.close(p2.coeffs[0], -m2, 1e-10, std::string(c.name) + " p2 vs moment ratio");
        g.near(p2.coeffs[1], 0.0, 1e-12, std::string(c.name) + " p2 odd slot");
        g.near(p2.coeffs[2], 1.0, 1e-12, std::string(c.name) + " p2 monic");
        const PolyCoeffs p3 = gram_schmidt_orthopoly(mu, 3);
        g.close(p3.coeffs[1], -m4 / m2, 1e-10, std::string(c.name) + " p3 vs moment ratio");
        g.near(p3.coeffs[0], 0.0, 1e-12, std::string(c.name) + " p3 even slot");
        g.near(p3.coeffs[2], 0.0, 1e-12, std::string(c.name) + " p3 even slot");
        g.near(p3.coeffs[3], 1.0, 1e-12, std::string(c.name) + " p3 monic");
    }

    // Quadrature orthogonality. White noise: closed-form density under the
    // adaptive integrator. rho=0.5: contour-route density tabulated once on
    // a fixed symmetric Gauss-Legendre grid over [-20, 20]; beyond |x| = 20
    // the integrand x^8 rho(x) is below 1e-7 absolute (the x^8-weighted
    // tail), invisible at the 1e-8 normalized tolerance.
    {
        GWMeasure mu{fh_density(cx.gauss), 1};
        std::vector<PolyCoeffs> p;
        for (int n = 0; n <= 4; ++n) p.push_back(gram_schmidt_orthopoly(mu, n));
        auto pair_integral = [&](int i, int j) {
            return integrate_real_line(
                       [&](double x) {
                           return p[i].eval(x) * p[j].eval(x) * gwm_density(mu, {x});
                       },
                       1e-9)
                .value;
        };
        double norm2[5];
        for (int i = 0; i <= 4; ++i) {
            norm2[i] = pair_integral(i, i);
            g.expect(norm2[i] > 0.0, "white-noise orthogonality norm positivity");
        }
        for (int i = 0; i <= 4; ++i) {
            for (int j = i + 1; j <= 4; ++j) {
                const double v = pair_integral(i, j) / std::sqrt(norm2[i] * norm2[j]);
                g.near(v, 0.0, 1e-8,
                       "white-noise orthogonality (" + std::to_string(i) + "," +
                           std::to_string(j) + ")");
            }
        }
    }
    {
        GWMeasure mu{fh_density(cx.ml05), 1};
        std::vector<PolyCoeffs> p;
        for (int n = 0; n <= 4; ++n) p.push_back(gram_schmidt_orthopoly(mu, n));

        const int panels = 48;
        const double hi = 20.0;
        std::vector<double> xs, ws;
        for (int k = 0; k < panels; ++k) {
            const double a = hi * k / panels, b = hi * (k + 1) / panels;
            const double cmid = 0.5 * (a + b), h = 0.5 * (b - a);
            xs.push_back(cmid);
            ws.push_back(h * detail::kGL15Weight[0]);
            for (int q = 1; q < 8; ++q) {
                xs.push_back(cmid - h * detail::kGL15Node[q]);
                ws.push_back(h * detail::kGL15Weight[q]);
                xs.push_back(cmid + h * detail::kGL15Node[q]);
                ws.push_back(h * detail::kGL15Weight[q]);
            }
        }
        std::vector<double> dens(xs.size());
        for (size_t k = 0; k < xs.size(); ++k) dens[k] = gwm_density_foxh(mu, {xs[k]}, 1e-9);

        auto pair_integral = [&](int i, int j) {
            double s = 0.0;
            for (size_t k = 0; k < xs.size(); ++k) {
                s += ws[k] * dens[k] *
                     (p[i].eval(xs[k]) * p[j].eval(xs[k]) +
                      p[i].eval(-xs[k]) * p[j].eval(-xs[k]));
            }
            return s;
        };
        double norm2[5];
        for (int i = 0; i <= 4; ++i) {
            norm2[i] = pair_integral(i, i);
            g.expect(norm2[i] > 0.0, "rho=0.5 orthogonality norm positivity");
        }
        // Norms themselves should reproduce the closed-form moments: the
        // degree-0 norm is the total mass.
        g.close(norm2[0], 1.0, 1e-7, "rho=0.5 density mass on the grid");
        for (int i = 0; i <= 4; ++i) {
            for (int j = i + 1; j <= 4; ++j) {
                const double v = pair_integral(i, j) / std::sqrt(norm2[i] * norm2[j]);
                g.near(v, 0.0, 1e-8,
                       "rho=0.5 orthogonality (" + std::to_string(i) + "," +
                           std::to_string(j) + ")");
            }
        }
    }
    return g.ok;
}

// ---------------------------------------------------------------------------
// 8. Delta expectations and the T-transform: phi = 0 equals the Gamma-ratio
//    expectation, the rho = 0.5 value matches the frozen Gamma anchors, the
//    delta expectation at unit eta is the d = 1 density, and the pathwise
//    integral is controlled by the integrability bound for |phi| < M.
bool criterion8(const Ctx& cx, std::vector<std::string>& notes) {
    Gate g{&notes};
    const double s2pi = std::sqrt(2.0 * M_PI);
    struct Case {
        const ValidatedFamily* fam;
        const char* name;
    };
    const Case cases[] = {
        {&cx.gauss, "white-noise"}, {&cx.ml05, "rho=0.5"}, {&cx.ml09, "rho=0.9"}};

    for (const auto& c : cases) {
        const double want1 = donsker_expectation(*c.fam, 1.0);
        PairingData pd0;  // eta_eta = 1, phi = 0
        const auto t0 = donsker_t_transform(*c.fam, pd0, 1e-11);
        g.near(t0.imag(), 0.0, 1e-12 * std::fabs(want1),
               std::string(c.name) + " T-transform real at phi=0");
        g.close(t0.real(), want1, 1e-12, std::string(c.name) + " T-transform at phi=0");
        PairingData pd4;
        pd4.eta_eta = 4.0;
        g.close(donsker_t_transform(*c.fam, pd4, 1e-11).real(),
                donsker_expectation(*c.fam, 4.0), 1e-12,
                std::string(c.name) + " T-transform at phi=0, eta_eta=4");
        g.close(donsker_expectation(*c.fam, 4.0), 0.5 * want1, 1e-12,
                std::string(c.name) + " expectation eta scaling");
    }

    g.close(donsker_expectation(cx.ml05, 1.0), oracle::kGammaHalf / (oracle::kGamma075 * s2pi),
            1e-10, "rho=0.5 expectation vs Gamma anchors");
    g.close(donsker_expectation(cx.ml09, 1.0), oracle::kGammaHalf / (oracle::kGamma055 * s2pi),
            1e-10, "rho=0.9 expectation vs Gamma anchors");
    g.close(donsker_expectation(cx.gauss, 1.0), 1.0 / s2pi, 1e-12,
            "white-noise expectation");

    // Unit-eta delta expectation is the one-dimensional density.
    GWMeasure mu5{fh_density(cx.ml05), 1};
    for (double a : {0.0, 0.5, 1.0, 2.0}) {
        g.close(donsker_at_a(cx.ml05, 1.0, a, 1e-8), gwm_density(mu5, {a}, 1e-8), 1e-6,
                "rho=0.5 delta expectation a=" + std::to_string(a));
    }
    for (double a : {0.5, 1.0, 2.0}) {
        g.close(donsker_at_a_foxh(cx.ml05, 1.0, a, 1e-8), gwm_density(mu5, {a}, 1e-8), 1e-6,
                "rho=0.5 delta expectation (contour) a=" + std::to_string(a));
    }
    GWMeasure mu9{fh_density(cx.ml09), 1};
    g.close(donsker_at_a(cx.ml09, 1.0, 1.0, 1e-7), gwm_density(mu9, {1.0}, 1e-8), 1e-6,
            "rho=0.9 delta expectation a=1");
    g.close(donsker_at_a_foxh(cx.ml09, 1.0, 1.0, 1e-8), gwm_density(mu9, {1.0}, 1e-8), 1e-6,
            "rho=0.9 delta expectation (contour) a=1");
    g.close(donsker_at_a(cx.gauss, 1.0, 0.8), std::exp(-0.32) / s2pi, 1e-10,
            "white-noise delta expectation a=0.8");

    // T-transform at a complex pairing against a direct 80-term shifted sum.
    {
        PairingData pd;
        pd.eta_eta = 1.0;
        pd.phi_phi = {0.5, 0.3};
        pd.eta_phi = {0.2, -0.1};
        const std::complex<double> z = 0.5 * (pd.phi_phi - pd.eta_phi * pd.eta_phi);
        std::complex<double> sum = 0.0, zp = 1.0;
        double lkfac = 0.0;
        for (int k = 0; k < 80; ++k) {
            if (k > 0) {
                zp *= -z;
                lkfac += std::log(static_cast<double>(k));
            }
            sum += zp * std::exp(std::lgamma(0.5 + k) - std::lgamma(0.75 + 0.5 * k) - lkfac);
        }
        sum /= s2pi;
        const auto got = donsker_t_transform(cx.ml05, pd, 1e-11);
        g.close(got.real(), sum.real(), 1e-10, "rho=0.5 T-transform, complex pairing (re)");
        g.close(got.imag(), sum.imag(), 1e-10, "rho=0.5 T-transform, complex pairing (im)");
    }

    // Integrability: the |Psi| integral stays under the bound for three
    // pairings with |phi| in {0.5, 0.7, 0.9}, all below M = 0.95, and the
    // bound is monotone in M.
    {
        const double pairs[3][2] = {{0.25, 0.1}, {0.49, -0.3}, {0.81, 0.5}};
        const double b5 = integrability_bound(cx.ml05, 0.95, 1.0);
        g.expect(std::isfinite(b5) && b5 > 0.0, "rho=0.5 bound finite and positive");
        g.expect(integrability_bound(cx.ml05, 0.5, 1.0) <= b5, "rho=0.5 bound monotone in M");
        const double bg = integrability_bound(cx.gauss, 0.95, 1.0);
        for (const auto& pr : pairs) {
            PairingData pd;
            pd.eta_eta = 1.0;
            pd.phi_phi = pr[0];
            pd.eta_phi = pr[1];
            const double lhs = donsker_integral_lhs(cx.ml05, pd, 1e-5);
            g.expect(std::isfinite(lhs) && lhs > 0.0, "rho=0.5 |Psi| integral finite");
            g.expect(lhs <= b5, "rho=0.5 |Psi| integral under the bound, phi_phi=" +
                                    std::to_string(pr[0]));
            const double lg = donsker_integral_lhs(cx.gauss, pd, 1e-7);
            g.close(lg, s2pi * std::exp(0.5 * (pr[1] * pr[1] - pr[0])), 1e-6,
                    "white-noise |Psi| integral closed form");
            g.expect(lg <= bg, "white-noise |Psi| integral under the bound");
        }
        const double b9 = integrability_bound(cx.ml09, 0.95, 1.0);
        PairingData pd;
        pd.eta_eta = 1.0;
        pd.phi_phi = 0.49;
        pd.eta_phi = -0.3;
        const double l9 = donsker_integral_lhs(cx.ml09, pd, 1e-4);
        g.expect(std::isfinite(l9) && l9 > 0.0 && l9 <= b9,
                 "rho=0.9 |Psi| integral under the bound");
    }
    return g.ok;
}

// ---------------------------------------------------------------------------
// 9. Reproducibility through the command line: identical seeds give
//    byte-identical sample CSVs across repeated runs and thread counts.
bool criterion9(const Ctx&, std::vector<std::string>& notes) {
    Gate g{&notes};
    const std::string bin = GWRIGHT_CLI_PATH;
    const std::string fams = GWRIGHT_FAMILY_DIR;

    auto run = [&](const std::string& env, const std::string& args) -> int {
        const std::string cmd = env + " " + bin + " " + args + " > /dev/null 2>&1";
        const int rc = std::system(cmd.c_str());
        return (rc != -1 && WIFEXITED(rc)) ? WEXITSTATUS(rc) : -1;
    };
    auto slurp = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    const std::string ml = " sample --params " + fams + "/ml05.json --d 2 --n 20000 --seed 777";
    g.expect(run("GWRIGHT_THREADS=1", ml + " --out /tmp/gwright_acc_a.csv") == 0,
             "sample run A exits 0");
    g.expect(run("GWRIGHT_THREADS=1", ml + " --out /tmp/gwright_acc_b.csv") == 0,
             "sample run B exits 0");
    g.expect(run("GWRIGHT_THREADS=7", ml + " --out /tmp/gwright_acc_c.csv") == 0,
             "sample run C exits 0");
    g.expect(run("GWRIGHT_THREADS=3",
                 " sample --params " + fams + "/ml05.json --d 2 --n 20000 --seed 778" +
                     " --out /tmp/gwright_acc_d.csv") == 0,
             "sample run D exits 0");
    const std::string a = slurp("/tmp/gwright_acc_a.csv");
    const std::string b = slurp("/tmp/gwright_acc_b.csv");
    const std::string c = slurp("/tmp/gwright_acc_c.csv");
    const std::string d = slurp("/tmp/gwright_acc_d.csv");
    g.expect(!a.empty() && a.rfind("x1,x2", 0) == 0, "two-column CSV header");
    g.expect(a == b, "same seed, same thread count: byte-identical");
    g.expect(a == c, "same seed, different thread count: byte-identical");
    g.expect(a != d, "different seed changes the draws");

    const std::string wn = " sample --params " + fams + "/gaussian.json --n 10000 --seed 42";
    g.expect(run("GWRIGHT_THREADS=2", wn + " --out /tmp/gwright_acc_e.csv") == 0,
             "white-noise run exits 0");
    g.expect(run("GWRIGHT_THREADS=5", wn + " --out /tmp/gwright_acc_f.csv") == 0,
             "white-noise run exits 0");
    const std::string e = slurp("/tmp/gwright_acc_e.csv");
    g.expect(!e.empty() && e.rfind("x1", 0) == 0, "one-column CSV header");
    g.expect(e == slurp("/tmp/gwright_acc_f.csv"),
             "white-noise thread-count invariance: byte-identical");
    return g.ok;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        double budget_s;  // 0 = no budget
        bool (*fn)(const Ctx&, std::vector<std::string>&);
    };
    const Criterion list[] = {
        {1, 10.0, criterion1}, {2, 10.0, criterion2}, {3, 30.0, criterion3},
        {4, 0.0, criterion4},  {5, 120.0, criterion5}, {6, 0.0, criterion6},
        {7, 0.0, criterion7},  {8, 0.0, criterion8},  {9, 0.0, criterion9},
    };

    const Ctx cx{ref::gaussian(), ref::ml05(), ref::ml09()};
    int failures = 0;
    for (const auto& c : list) {
        std::vector<std::string> notes;
        bool ok = false;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            ok = c.fn(cx, notes);
        } catch (const std::exception& e) {
            notes.push_back(std::string("unexpected exception: ") + e.what());
        }
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0.0 && dt > c.budget_s) {
            ok = false;
            char buf[96];
            std::snprintf(buf, sizeof buf, "runtime %.1fs exceeds the %.0fs budget", dt,
                          c.budget_s);
            notes.push_back(buf);
        }
        std::printf("criterion %d: %s\n", c.id, ok ? "PASS" : "FAIL");
        std::fflush(stdout);
        std::fprintf(stderr, "criterion %d: %.1fs\n", c.id, dt);
        for (const auto& n : notes) {
            std::fprintf(stderr, "criterion %d: %s\n", c.id, n.c_str());
        }
        if (!ok) ++failures;
    }
    return failures;
}
