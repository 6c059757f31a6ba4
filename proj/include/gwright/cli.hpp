#pragma once

// Command-line surface. Subcommands: eval, density, moments, sample,
// hermite, donsker, check. Results go to stdout as JSON or to --out as CSV.
// Exit codes: 0 success, 1 computational error, 2 usage error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gwright/donsker.hpp"
#include "gwright/errors.hpp"
#include "gwright/fhdam.hpp"
#include "gwright/measure.hpp"
#include "gwright/oracles.hpp"
#include "gwright/param_io.hpp"
#include "gwright/polynomials.hpp"
#include "gwright/wright.hpp"

namespace gwright::cli {

enum class Command { none, eval, density, moments, sample, hermite, donsker, check };

struct RunConfig {
    Command command = Command::none;
    std::string params_path;
    WrightParams params;

    double rtol = 1e-8;
    double arg = 0.0;              // eval
    std::string x_csv;             // density point, comma-separated coords
    std::string grid;              // density tabulation "lo:hi:count"
    int d = 1;                     // density / moments / sample
    int max_order = 4;             // moments
    std::int64_t n = 1000;         // sample count
    std::uint64_t seed = 0;        // sample / check
    std::string out_path;          // CSV destination
    int degree = 0;                // hermite
    std::string kind = "fox";      // hermite: fox | gram
    double eta_eta = 1.0;          // donsker
    double a = 0.0;                // donsker
    bool has_a = false;
    double phi_phi = 0.0;          // donsker, real pairings
    double eta_phi = 0.0;
    double bound_M = 1.0;
    std::string suite = "all";     // check: basic | all
    std::int64_t check_n = 200000;  // check MC sample count
};

// Thrown by parse_config when --help is requested; carries the help text.
struct help_requested {
    std::string text;
};

namespace cli_detail {

inline std::vector<double> parse_csv_doubles(const std::string& s, const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            size_t pos = 0;
            out.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw parse_error(std::string(what) + ": '" + tok + "' is not a number");
        }
    }
    if (out.empty()) throw parse_error(std::string(what) + ": empty list");
    return out;
}

struct GridSpec {
    double lo, hi;
    int count;
};

inline GridSpec parse_grid(const std::string& s) {
    GridSpec g{};
    char c1 = 0, c2 = 0;
    std::stringstream ss(s);
    if (!(ss >> g.lo >> c1 >> g.hi >> c2 >> g.count) || c1 != ':' || c2 != ':' ||
        !(ss >> std::ws).eof() || g.count < 2 || !(g.hi > g.lo)) {
        throw parse_error("--grid: expected lo:hi:count with hi > lo and count >= 2, got '" +
                          s + "'");
    }
    return g;
}

}  // namespace cli_detail

// Builds the CLI11 app over cfg. Kept separate so tests can drive parsing
// without a process boundary.
inline void parse_config(const std::vector<std::string>& args, RunConfig& cfg) {
    CLI::App app{"generalized Wright measures: evaluation, densities, sampling, checks"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--params", cfg.params_path, "parameter file (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--rtol", cfg.rtol, "relative tolerance");
    };

    auto* eval = app.add_subcommand("eval", "evaluate (1/K) Psi(arg)");
    add_common(eval);
    eval->add_option("--arg", cfg.arg, "argument")->required();

    auto* density = app.add_subcommand("density", "measure density");
    add_common(density);
    density->add_option("--d", cfg.d, "dimension")->check(CLI::PositiveNumber);
    auto* xopt = density->add_option("--x", cfg.x_csv, "point, comma-separated coordinates");
    density->add_option("--grid", cfg.grid, "1-d tabulation lo:hi:count (CSV to --out)")
        ->excludes(xopt);
    density->add_option("--out", cfg.out_path, "CSV output path");

    auto* moments = app.add_subcommand("moments", "mixed moments up to a total order");
    add_common(moments);
    moments->add_option("--d", cfg.d, "dimension")->check(CLI::PositiveNumber);
    moments->add_option("--max-order", cfg.max_order, "maximum total order")
        ->check(CLI::NonNegativeNumber);

    auto* sample = app.add_subcommand("sample", "draw from the measure");
    add_common(sample);
    sample->add_option("--d", cfg.d, "dimension")->check(CLI::PositiveNumber);
    sample->add_option("--n", cfg.n, "number of draws")->required()->check(CLI::PositiveNumber);
    sample->add_option("--seed", cfg.seed, "64-bit seed")->required();
    sample->add_option("--out", cfg.out_path, "CSV output path")->required();

    auto* hermite = app.add_subcommand("hermite", "polynomial coefficients (JSON, ascending)");
    add_common(hermite);
    hermite->add_option("--n", cfg.degree, "degree")->required()->check(CLI::NonNegativeNumber);
    hermite->add_option("--kind", cfg.kind, "fox | gram")
        ->check(CLI::IsMember({"fox", "gram"}));

    auto* donsker = app.add_subcommand("donsker", "Donsker delta report");
    add_common(donsker);
    donsker->add_option("--eta-eta", cfg.eta_eta, "<eta,eta>")->check(CLI::PositiveNumber);
    donsker->add_option("--a", cfg.a, "evaluation point for delta_a");
    donsker->add_option("--phi-phi", cfg.phi_phi, "<phi,phi> (real)");
    donsker->add_option("--eta-phi", cfg.eta_phi, "<eta,phi> (real)");
    donsker->add_option("--bound-M", cfg.bound_M, "M for the integrability bound")
        ->check(CLI::PositiveNumber);

    auto* check = app.add_subcommand("check", "self-check suite (exit 0 iff all pass)");
    add_common(check);
    check->add_option("--suite", cfg.suite, "basic | all (all adds Monte Carlo)")
        ->check(CLI::IsMember({"basic", "all"}));
    check->add_option("--n", cfg.check_n, "Monte Carlo sample count")
        ->check(CLI::PositiveNumber);
    check->add_option("--seed", cfg.seed, "64-bit seed");

    // CLI11 consumes the vector back-to-front.
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        throw help_requested{app.help()};
    } catch (const CLI::ParseError& e) {
        throw parse_error(e.what());
    }

    CLI::App* active = nullptr;
    if (eval->parsed()) { cfg.command = Command::eval; active = eval; }
    else if (density->parsed()) { cfg.command = Command::density; active = density; }
    else if (moments->parsed()) { cfg.command = Command::moments; active = moments; }
    else if (sample->parsed()) { cfg.command = Command::sample; active = sample; }
    else if (hermite->parsed()) { cfg.command = Command::hermite; active = hermite; }
    else if (donsker->parsed()) { cfg.command = Command::donsker; active = donsker; }
    else if (check->parsed()) { cfg.command = Command::check; active = check; }
    if (!active) throw parse_error("a subcommand is required");

    if (active->count("--rtol") == 0) {
        // Quadrature-backed commands default looser than evaluation commands.
        cfg.rtol = cfg.command == Command::density ? 1e-6 : 1e-8;
    }
    if (!(cfg.rtol > 0.0 && cfg.rtol <= 1e-2)) {
        throw parse_error("--rtol must lie in (0, 1e-2]");
    }
    if (donsker->parsed()) cfg.has_a = donsker->count("--a") > 0;
    if (density->parsed() && cfg.x_csv.empty() && cfg.grid.empty()) {
        throw parse_error("density: provide --x or --grid");
    }
    if (density->parsed() && !cfg.grid.empty()) {
        cli_detail::parse_grid(cfg.grid);  // validate early
        if (cfg.out_path.empty()) throw parse_error("density --grid requires --out");
        if (cfg.d != 1) throw parse_error("density --grid supports d = 1 only");
    }
    cfg.params = load_params_file(cfg.params_path);
}

namespace cli_detail {

inline void multi_indices_up_to(int d, int max_total, std::vector<int>& cur,
                                std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == d) {
        out.push_back(cur);
        return;
    }
    int used = 0;
    for (int v : cur) used += v;
    for (int v = 0; v + used <= max_total; ++v) {
        cur.push_back(v);
        multi_indices_up_to(d, max_total, cur, out);
        cur.pop_back();
    }
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw state_error("cannot open output file '" + path + "'");
    return os;
}

inline std::vector<CheckItem> run_suite(const RunConfig& cfg) {
    CheckSuite suite;
    const ValidatedFamily fam = validate(cfg.params);
    const GWMeasure mu1 = gw_measure(fam, 1);
    const FHDensity& rho = mu1.mixing;

    suite.add("psi_at_zero", 1.0, family_psi(fam, 0.0).real() / fam.K, 1e-12);
    suite.add("laplace_at_zero", 1.0, fh_laplace(rho, 0.0), 1e-12);
    suite.add("char_fn_at_zero", 1.0, char_fn(mu1, {0.0}), 1e-12);

    if (!fam.white_noise) {
        auto pdf = [&](double t) { return t > 0.0 ? fh_pdf(rho, t) : 0.0; };
        suite.add("density_normalization", 1.0,
                  integrate_half_line(pdf, 1e-8).value, 1e-6);
        for (int l : {1, 2}) {
            auto f = [&](double t) { return t > 0.0 ? std::pow(t, l) * fh_pdf(rho, t) : 0.0; };
            suite.add("moment_quadrature_l" + std::to_string(l), fh_moment(rho, l),
                      integrate_half_line(f, 1e-8).value, 1e-6 * fh_moment(rho, l));
        }
        {
            const double s = 1.0;
            auto f = [&](double t) {
                return t > 0.0 ? std::exp(-s * t) * fh_pdf(rho, t) : 0.0;
            };
            suite.add("laplace_quadrature_s1", fh_laplace(rho, s),
                      integrate_half_line(f, 1e-8).value, 1e-6 * fh_laplace(rho, s));
        }
    }
    for (double z : {0.5, 2.0}) {
        const double series = family_psi(fam, -z, 1e-10).real();
        const double contour =
            gwf_via_foxh(psi_numer(fam), psi_denom(fam), z, 1e-10);
        suite.add("series_contour_z" + std::to_string(z).substr(0, 3), series, contour,
                  1e-8 * std::fabs(series));
    }
    if (check_donsker_params(fam)) {
        PairingData pd;
        pd.eta_eta = 1.0;
        suite.add("donsker_phi0_consistency", donsker_expectation(fam, 1.0),
                  donsker_t_transform(fam, pd).real(),
                  1e-12 * donsker_expectation(fam, 1.0));
    }
    {
        const auto gen = fox_hermite_gen(fam, 1.0, 0.5, 30);
        suite.add("generating_fn_truncation", gen.closed_form, gen.partial_sum,
                  1e-8 * std::max(std::fabs(gen.closed_form), 1.0));
    }
    {
        const PolyCoeffs h2 = gram_schmidt_orthopoly(mu1, 2);
        suite.add("gram_schmidt_h2_const", -fh_moment(rho, 1), h2.coeffs[0],
                  1e-10 * fh_moment(rho, 1));
    }

    if (cfg.suite == "all") {
        const SampleMatrix s = sample_batch(mu1, RngState::seeded(cfg.seed), cfg.check_n);
        {
            const auto est = mc_moment(s, MultiIndex({1}));
            suite.add_mc("mc_mean", 0.0, est.value, est.std_error);
        }
        for (int order : {2, 4}) {
            const auto est = mc_moment(s, MultiIndex({order}));
            suite.add_mc("mc_moment_" + std::to_string(order),
                         mixed_moment(mu1, MultiIndex({order})), est.value, est.std_error);
        }
        {
            const auto est = mc_char_fn(s, {1.0});
            suite.add_mc("mc_char_fn_y1", char_fn(mu1, {1.0}), est.value.real(), est.se_re);
            suite.add_mc("mc_char_fn_y1_imag", 0.0, est.value.imag(), est.se_im);
        }
        {
            // E[e^{<x, phi>}] against the exponential-moment formula.
            double acc = 0.0;
            std::vector<double> vals(static_cast<size_t>(s.n));
            for (std::int64_t i = 0; i < s.n; ++i) {
                vals[static_cast<size_t>(i)] = std::exp(s.at(i, 0));
                acc += vals[static_cast<size_t>(i)];
            }
            const double mean = acc / s.n;
            double var = 0.0;
            for (double v : vals) var += (v - mean) * (v - mean);
            var /= (s.n - 1);
            suite.add_mc("mc_exp_moment", laplace_fn(mu1, 1.0, {1.0}), mean,
                         std::sqrt(var / s.n));
        }
    }
    return suite.finalize();
}

inline int run_config(const RunConfig& cfg) {
    using nlohmann::json;
    const ValidatedFamily fam = validate(cfg.params);

    switch (cfg.command) {
        case Command::eval: {
            SeriesDiagnostics diag;
            const std::complex<double> v = family_psi_ex(fam, cfg.arg, cfg.rtol, &diag);
            json out;
            out["value"] = v.real() / fam.K;
            if (v.imag() != 0.0) out["value_im"] = v.imag() / fam.K;
            out["terms"] = diag.terms;
            out["route"] = diag.route == SeriesRoute::series ? "series"
                           : diag.route == SeriesRoute::contour ? "contour"
                           : diag.route == SeriesRoute::laplace_integral ? "laplace_integral"
                                                                         : "closed_form";
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        case Command::density: {
            const GWMeasure mu = gw_measure(fam, cfg.d);
            if (!cfg.grid.empty()) {
                const auto g = cli_detail::parse_grid(cfg.grid);
                auto os = open_out(cfg.out_path);
                os << "x,density\n";
                char buf[64];
                for (int i = 0; i < g.count; ++i) {
                    const double x = g.lo + (g.hi - g.lo) * i / (g.count - 1.0);
                    std::snprintf(buf, sizeof buf, "%.17g", x);
                    os << buf << ",";
                    std::snprintf(buf, sizeof buf, "%.17g", gwm_density(mu, {x}, cfg.rtol));
                    os << buf << "\n";
                }
                return 0;
            }
            const std::vector<double> x = parse_csv_doubles(cfg.x_csv, "--x");
            json out;
            out["x"] = x;
            out["density"] = gwm_density(mu, x, cfg.rtol);
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        case Command::moments: {
            const GWMeasure mu = gw_measure(fam, cfg.d);
            std::vector<std::vector<int>> idx;
            std::vector<int> cur;
            multi_indices_up_to(cfg.d, cfg.max_order, cur, idx);
            json out;
            for (const auto& k : idx) {
                std::string key;
                for (size_t i = 0; i < k.size(); ++i) {
                    key += (i ? "," : "") + std::to_string(k[i]);
                }
                out[key] = mixed_moment(mu, MultiIndex(k));
            }
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        case Command::sample: {
            const GWMeasure mu = gw_measure(fam, cfg.d);
            const SampleMatrix s = sample_batch(mu, RngState::seeded(cfg.seed), cfg.n);
            auto os = open_out(cfg.out_path);
            write_samples_csv(s, os);
            return 0;
        }
        case Command::hermite: {
            PolyCoeffs p;
            if (cfg.kind == "gram") {
                p = gram_schmidt_orthopoly(gw_measure(fam, 1), cfg.degree);
            } else {
                p = fox_hermite(fam, cfg.degree);
            }
            export_poly_json(p, std::cout);
            std::cout << "\n";
            return 0;
        }
        case Command::donsker: {
            PairingData pd;
            pd.eta_eta = cfg.eta_eta;
            pd.phi_phi = cfg.phi_phi;
            pd.eta_phi = cfg.eta_phi;
            const std::complex<double> tt = donsker_t_transform(fam, pd, cfg.rtol);
            json out;
            out["t_transform_re"] = tt.real();
            out["t_transform_im"] = tt.imag();
            out["expectation"] = donsker_expectation(fam, cfg.eta_eta);
            out["bound"] = integrability_bound(fam, cfg.bound_M, cfg.eta_eta);
            if (cfg.has_a) out["at_a"] = donsker_at_a(fam, cfg.eta_eta, cfg.a);
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        case Command::check: {
            const auto items = run_suite(cfg);
            write_check_report(items, std::cout);
            return all_pass(items) ? 0 : 1;
        }
        case Command::none:
            break;
    }
    throw state_error("no command dispatched");
}

}  // namespace cli_detail

inline int run(int argc, const char* const* argv) {
    RunConfig cfg;
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    try {
        parse_config(args, cfg);
    } catch (const help_requested& h) {
        std::cout << h.text;
        return 0;
    } catch (const parse_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }
    try {
        return cli_detail::run_config(cfg);
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace gwright::cli
