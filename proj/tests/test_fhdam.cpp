// The mixing law on the half-line: pointwise density, closed-form moments,
// Laplace transform, and inverse-CDF sampling.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "gwright/errors.hpp"
#include "gwright/fhdam.hpp"
#include "gwright/quadrature.hpp"
#include "gwright/rng.hpp"

#include "oracle_constants.hpp"
#include "reference.hpp"

using namespace gwright;

namespace {

// Sampler construction tabulates a contour table; share one instance per
// family across the test cases in this binary.
const FHDensity& rho5() {
    static const FHDensity r = build_sampler(fh_density(ref::ml05()));
    return r;
}

const FHDensity& rho9() {
    static const FHDensity r = build_sampler(fh_density(ref::ml09()));
    return r;
}

}  // namespace

TEST_CASE("density values match the closed half-width form") {
    REQUIRE(ref::rel_err(fh_pdf(rho5(), 1.0), oracle::kMHalfAtOne) < 1e-9);
    for (double tau : {0.1, 0.5, 2.0, 4.0}) {
        REQUIRE(ref::rel_err(fh_pdf(rho5(), tau), ref::m_half(tau)) < 1e-8);
    }
    // Below the tabulated range the residue expansion takes over seamlessly.
    REQUIRE(ref::rel_err(fh_pdf(rho5(), 1e-10), ref::m_half(1e-10)) < 1e-12);
}

TEST_CASE("the steep family hits its frozen anchors") {
    for (const auto& row : oracle::kMNineGrid) {
        const double got = fh_pdf(rho9(), row.tau);
        if (row.value > 1e-14) {
            REQUIRE(ref::rel_err(got, row.value) < 1e-8);
        } else {
            // True value is below double-precision contour resolution; the
            // clamped density must sit at numerical zero.
            REQUIRE(std::fabs(got) <= 1e-14);
        }
    }
    // Beyond the superexponential cutoff the density is exactly zero.
    const ContourTable& table = mixing_table(rho9().fam);
    REQUIRE(fh_pdf(rho9(), table.z_hi() * 1.01) == 0.0);
}

TEST_CASE("density argument and family restrictions") {
    REQUIRE_THROWS_AS(fh_pdf(rho5(), 0.0), argument_error);
    REQUIRE_THROWS_AS(fh_pdf(rho5(), -1.0), argument_error);
    const FHDensity white = fh_density(ref::gaussian());
    REQUIRE_THROWS_AS(fh_pdf(white, 1.0), unsupported_error);
}

TEST_CASE("the density integrates to one") {
    auto pdf5 = [&](double t) { return t > 0.0 ? fh_pdf(rho5(), t) : 0.0; };
    REQUIRE(std::fabs(integrate_half_line(pdf5, 1e-8).value - 1.0) < 2e-6);
    auto pdf9 = [&](double t) { return t > 0.0 ? fh_pdf(rho9(), t) : 0.0; };
    REQUIRE(std::fabs(integrate_half_line(pdf9, 1e-8).value - 1.0) < 2e-6);
}

TEST_CASE("moments come out as gamma ratios") {
    // For the half-index family E[tau^l] = Gamma(l+1) / Gamma(l/2 + 1).
    for (int l = 0; l <= 6; ++l) {
        const double want = std::exp(std::lgamma(l + 1.0) - std::lgamma(0.5 * l + 1.0));
        REQUIRE(ref::rel_err(fh_moment(rho5(), l), want) < 1e-13);
    }
    for (int l = 0; l <= 4; ++l) {
        const double want = std::exp(std::lgamma(l + 1.0) - std::lgamma(0.9 * l + 1.0));
        REQUIRE(ref::rel_err(fh_moment(rho9(), l), want) < 1e-13);
    }
}

TEST_CASE("fractional moments agree with direct quadrature") {
    const ContourTable& table = mixing_table(rho5().fam);
    for (double l : {-0.5, 2.5}) {
        // integrate in u = sqrt(t); written in t the l = -1/2 integrand has
        // an integrable singularity at 0 that panel bisection cannot chase
        auto f = [&](double u) {
            return u > 0.0 ? 2.0 * std::pow(u, 2.0 * l + 1.0) * fh_pdf(rho5(), u * u) : 0.0;
        };
        const double quad = integrate(f, 0.0, std::sqrt(table.z_hi()), 1e-8).value;
        REQUIRE(ref::rel_err(fh_moment(rho5(), l), quad) < 1e-6);
    }
}

TEST_CASE("moments at gamma poles are refused") {
    WrightParams p;
    p.lower = {{0.5, 1.0}};
    const FHDensity rho = fh_density(validate(p));
    REQUIRE_THROWS_AS(fh_moment(rho, -2.5), pole_error);  // argument lands on -1
}

TEST_CASE("the Laplace transform matches anchors and quadrature") {
    REQUIRE(ref::rel_err(fh_laplace(rho5(), 0.0), 1.0) < 1e-12);
    REQUIRE(ref::rel_err(fh_laplace(rho5(), 1.0), oracle::kMlHalfNegGrid[2].value) < 1e-10);
    REQUIRE(ref::rel_err(fh_laplace(rho9(), 1.0), oracle::kMlNineNegGrid[2].value) < 1e-9);

    const double s = 2.5;
    auto f = [&](double t) { return t > 0.0 ? std::exp(-s * t) * fh_pdf(rho5(), t) : 0.0; };
    REQUIRE(ref::rel_err(fh_laplace(rho5(), s), integrate_half_line(f, 1e-8).value) < 1e-6);

    // Negative s is the moment generating function; fine for entire
    // families, refused otherwise.
    REQUIRE(fh_laplace(rho5(), -0.5) > 1.0);
    WrightParams steep;
    steep.upper = {{3.0, 1.0}};
    steep.lower = {{0.5, 1.0}};
    const FHDensity rho = fh_density(validate(steep));
    REQUIRE_THROWS_AS(fh_laplace(rho, -1.0), unsupported_error);
}

TEST_CASE("the sampler grid is a proper CDF table") {
    const FHDensity& r = rho5();
    REQUIRE(r.has_sampler());
    REQUIRE(r.nonneg_checked);
    REQUIRE(r.grid_nodes.size() == r.grid_cdf.size());
    REQUIRE(r.grid_nodes.front() > 0.0);
    REQUIRE(std::is_sorted(r.grid_nodes.begin(), r.grid_nodes.end()));
    REQUIRE(std::is_sorted(r.grid_cdf.begin(), r.grid_cdf.end()));
    REQUIRE(r.grid_cdf.front() <= 1e-7);
    REQUIRE(r.grid_cdf.back() >= 1.0 - 1e-6);
    REQUIRE(r.grid_cdf.back() <= 1.0);

    // Spot-check the accumulated CDF against independent quadrature.
    const size_t mid = r.grid_nodes.size() / 2;
    auto f = [&](double t) { return t > 0.0 ? fh_pdf(r, t) : 0.0; };
    const double quad = integrate(f, 0.0, r.grid_nodes[mid], 1e-7).value;
    REQUIRE(std::fabs(r.grid_cdf[mid] - quad) < 1e-5);
}

TEST_CASE("sampling is reproducible and positive") {
    RngState a = RngState::seeded(2024);
    RngState b = RngState::seeded(2024);
    for (int i = 0; i < 64; ++i) {
        const double ta = fh_sample(rho5(), a);
        const double tb = fh_sample(rho5(), b);
        REQUIRE(ta == tb);
        REQUIRE(ta > 0.0);
    }
}

TEST_CASE("sample moments land within Monte Carlo error") {
    RngState rng = RngState::seeded(77);
    const int n = 20000;
    double m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = fh_sample(rho5(), rng);
        m1 += t;
        m2 += t * t;
    }
    m1 /= n;
    m2 /= n;
    const double e1 = fh_moment(rho5(), 1), e2 = fh_moment(rho5(), 2);
    const double se1 = std::sqrt((e2 - e1 * e1) / n);
    const double se2 = std::sqrt((fh_moment(rho5(), 4) - e2 * e2) / n);
    REQUIRE(std::fabs(m1 - e1) < 5.0 * se1);
    REQUIRE(std::fabs(m2 - e2) < 5.0 * se2);
}

TEST_CASE("the empirical CDF tracks the tabulated one") {
    RngState rng = RngState::seeded(31337);
    const int n = 20000;
    std::vector<double> draws(n);
    for (int i = 0; i < n; ++i) draws[i] = fh_sample(rho9(), rng);
    std::sort(draws.begin(), draws.end());
    const FHDensity& r = rho9();
    for (size_t i = 20; i + 20 < r.grid_nodes.size(); i += 40) {
        const double node = r.grid_nodes[i];
        const auto it = std::upper_bound(draws.begin(), draws.end(), node);
        const double emp = static_cast<double>(it - draws.begin()) / n;
        REQUIRE(std::fabs(emp - r.grid_cdf[i]) < 0.02);
    }
}

TEST_CASE("the point-mass family samples the constant path") {
    const FHDensity white = build_sampler(fh_density(ref::gaussian()));
    REQUIRE(white.has_sampler());
    RngState rng = RngState::seeded(4);
    for (int i = 0; i < 8; ++i) REQUIRE(fh_sample(white, rng) == 1.0);

    // One uniform per draw keeps streams aligned across families.
    RngState a = RngState::seeded(4);
    RngState b = RngState::seeded(4);
    (void)fh_sample(white, a);
    (void)b.uniform();
    REQUIRE(a.uniform() == b.uniform());

    REQUIRE_THROWS_AS([&] {
        std::ostringstream os;
        export_cdf_csv(white, os);
    }(), unsupported_error);
}

TEST_CASE("sampling without a built grid is a state error") {
    const FHDensity bare = fh_density(ref::ml05());
    RngState rng = RngState::seeded(1);
    REQUIRE_THROWS_AS(fh_sample(bare, rng), state_error);
}

TEST_CASE("the CDF export is a deterministic two-column table") {
    std::ostringstream a, b;
    export_cdf_csv(rho5(), a);
    export_cdf_csv(rho5(), b);
    const std::string text = a.str();
    REQUIRE(text == b.str());
    REQUIRE(text.rfind("node,cdf\n", 0) == 0);
    const size_t lines = static_cast<size_t>(std::count(text.begin(), text.end(), '\n'));
    REQUIRE(lines == rho5().grid_nodes.size() + 1);
}
