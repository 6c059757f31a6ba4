#pragma once

// Verification machinery shared by tests and the CLI check suite: Monte
// Carlo estimators with standard errors, and a report type that applies the
// acceptance policy (4 standard errors per comparison, widened to 5 when a
// suite exceeds 20 comparisons).

#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "gwright/errors.hpp"
#include "gwright/measure.hpp"

namespace gwright {

struct EstimateWithError {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t n_samples = 0;
};

// Sample mean of prod_i x_i^{k_i} with standard error sample_std / sqrt(N).
inline EstimateWithError mc_moment(const SampleMatrix& s, const MultiIndex& k) {
    if (s.n < 2) throw argument_error("mc_moment: need at least 2 samples");
    if (k.dim() != s.d) throw argument_error("mc_moment: index dimension mismatch");
    // Two-pass mean/variance keeps the reduction order fixed.
    double mean = 0.0;
    std::vector<double> vals(static_cast<size_t>(s.n));
    for (std::int64_t i = 0; i < s.n; ++i) {
        double p = 1.0;
        for (int j = 0; j < s.d; ++j) {
            for (int r = 0; r < k.k[j]; ++r) p *= s.at(i, j);
        }
        vals[static_cast<size_t>(i)] = p;
        mean += p;
    }
    mean /= s.n;
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= (s.n - 1);
    return EstimateWithError{mean, std::sqrt(var / s.n), s.n};
}

struct ComplexEstimate {
    std::complex<double> value;
    double se_re = 0.0;
    double se_im = 0.0;
    std::int64_t n_samples = 0;
};

// Mean of e^{i (y, x)} over rows, componentwise standard errors.
inline ComplexEstimate mc_char_fn(const SampleMatrix& s, const std::vector<double>& y) {
    if (s.n < 2) throw argument_error("mc_char_fn: need at least 2 samples");
    if (static_cast<int>(y.size()) != s.d) throw argument_error("mc_char_fn: dimension mismatch");
    double mre = 0.0, mim = 0.0;
    std::vector<double> res(static_cast<size_t>(s.n)), ims(static_cast<size_t>(s.n));
    for (std::int64_t i = 0; i < s.n; ++i) {
        double yx = 0.0;
        for (int j = 0; j < s.d; ++j) yx += y[j] * s.at(i, j);
        res[static_cast<size_t>(i)] = std::cos(yx);
        ims[static_cast<size_t>(i)] = std::sin(yx);
        mre += res[static_cast<size_t>(i)];
        mim += ims[static_cast<size_t>(i)];
    }
    mre /= s.n;
    mim /= s.n;
    double vre = 0.0, vim = 0.0;
    for (std::int64_t i = 0; i < s.n; ++i) {
        vre += (res[static_cast<size_t>(i)] - mre) * (res[static_cast<size_t>(i)] - mre);
        vim += (ims[static_cast<size_t>(i)] - mim) * (ims[static_cast<size_t>(i)] - mim);
    }
    vre /= (s.n - 1);
    vim /= (s.n - 1);
    return ComplexEstimate{{mre, mim}, std::sqrt(vre / s.n), std::sqrt(vim / s.n), s.n};
}

struct CheckItem {
    std::string name;
    double expected = 0.0;
    double observed = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// Collects comparisons, then applies the standard-error policy at report
// time: statistical tolerances are entered in SE units and widened from 4
// to 5 SE when the suite runs more than 20 comparisons.
class CheckSuite {
  public:
    // Deterministic comparison with a fixed tolerance.
    void add(std::string name, double expected, double observed, double tol) {
        items_.push_back({std::move(name), expected, observed, tol, false});
        se_units_.push_back(0.0);
    }
    // Statistical comparison; tolerance becomes (4 or 5) * se.
    void add_mc(std::string name, double expected, double observed, double se) {
        items_.push_back({std::move(name), expected, observed, 0.0, false});
        se_units_.push_back(std::max(se, 1e-300));
    }

    std::vector<CheckItem> finalize() {
        const double mult = items_.size() > 20 ? 5.0 : 4.0;
        for (size_t i = 0; i < items_.size(); ++i) {
            if (se_units_[i] > 0.0) items_[i].tolerance = mult * se_units_[i];
            items_[i].pass =
                std::fabs(items_[i].observed - items_[i].expected) <= items_[i].tolerance;
        }
        return items_;
    }

  private:
    std::vector<CheckItem> items_;
    std::vector<double> se_units_;
};

inline bool all_pass(const std::vector<CheckItem>& items) {
    for (const auto& it : items) {
        if (!it.pass) return false;
    }
    return true;
}

// JSON list of {name, expected, observed, tolerance, pass}.
inline void write_check_report(const std::vector<CheckItem>& items, std::ostream& os) {
    os << "[\n";
    char buf[64];
    for (size_t i = 0; i < items.size(); ++i) {
        const auto& it = items[i];
        os << "  {\"name\": \"" << it.name << "\", \"expected\": ";
        std::snprintf(buf, sizeof buf, "%.17g", it.expected);
        os << buf << ", \"observed\": ";
        std::snprintf(buf, sizeof buf, "%.17g", it.observed);
        os << buf << ", \"tolerance\": ";
        std::snprintf(buf, sizeof buf, "%.17g", it.tolerance);
        os << buf << ", \"pass\": " << (it.pass ? "true" : "false") << "}"
           << (i + 1 < items.size() ? "," : "") << "\n";
    }
    os << "]\n";
}

}  // namespace gwright
