#include "conelab/indicial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace conelab {

int IndicialChart::require_k() const {
    if (!k_certified)
        throw ConstraintError(
            "indicial: spectrum table too short to certify k (increase J_max)");
    return k;
}

const IndicialRoot& IndicialChart::root(int j) const {
    for (const auto& r : roots)
        if (r.j == j) return r;
    throw std::out_of_range("indicial: no root with index j");
}

std::vector<double> IndicialChart::pole_positions() const {
    std::vector<double> qs;
    for (const auto& r : roots) {
        qs.push_back(r.q_minus);
        qs.push_back(r.q_plus);
    }
    std::sort(qs.begin(), qs.end());
    qs.erase(std::unique(qs.begin(), qs.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-14; }),
             qs.end());
    return qs;
}

double IndicialChart::min_pole_gap() const {
    auto qs = pole_positions();
    double gap = std::numeric_limits<double>::infinity();
    for (size_t i = 1; i < qs.size(); ++i) gap = std::min(gap, qs[i] - qs[i - 1]);
    return gap;
}

bool IndicialChart::is_pole(double z, double tol) const {
    for (const auto& r : roots)
        if (std::abs(z - r.q_minus) < tol || std::abs(z - r.q_plus) < tol) return true;
    return false;
}

nlohmann::json IndicialChart::to_json() const {
    nlohmann::json j;
    j["n"] = n;
    j["k"] = k;
    j["roots"] = nlohmann::json::array();
    for (const auto& r : roots) {
        nlohmann::json rj = {{"j", r.j},
                             {"q_minus", r.q_minus},
                             {"q_plus", r.q_plus},
                             {"pole_order", r.pole_order}};
        if (r.q_minus_exact) rj["q_minus_exact"] = r.q_minus_exact->str();
        if (r.q_plus_exact) rj["q_plus_exact"] = r.q_plus_exact->str();
        j["roots"].push_back(rj);
    }
    return j;
}

IndicialChart indicial_roots(SpectrumPtr spec, int n) {
    if (!spec) throw ConstraintError("indicial: null spectrum");
    if (n != spec->n) throw ConstraintError("indicial: n does not match cross-section dimension");
    IndicialChart chart;
    chart.n = n;
    chart.spectrum = spec;
    const double half = 0.5 * (n - 1);
    for (const auto& e : spec->entries) {
        IndicialRoot r;
        r.j = e.j;
        double disc = half * half - e.lambda;  // >= 0 since lambda <= 0
        double sq = std::sqrt(disc);
        r.q_minus = half - sq;
        r.q_plus = half + sq;
        if (e.lambda_exact) {
            Rational h(n - 1, 2);
            Rational d = h * h - *e.lambda_exact;
            Rational sr;
            if (d.sqrt_exact(sr)) {
                r.q_minus_exact = h - sr;
                r.q_plus_exact = h + sr;
                r.q_minus = r.q_minus_exact->value();
                r.q_plus = r.q_plus_exact->value();
            }
        }
        r.pole_order = (n == 1 && e.j == 0) ? 2 : 1;
        chart.roots.push_back(r);
    }
    // k: largest index with q_k^- > -2; certified only if the table reaches
    // at or below the threshold.
    int k = -1;
    for (const auto& r : chart.roots) {
        bool above;
        if (r.q_minus_exact)
            above = *r.q_minus_exact > Rational(-2);
        else
            above = r.q_minus > -2.0 && std::abs(r.q_minus + 2.0) >= 1e-12;
        if (above)
            k = r.j;
        else {
            chart.k_certified = true;
            break;
        }
    }
    chart.k = chart.k_certified ? k : -1;
    return chart;
}

std::vector<std::complex<double>> mellin_symbol_inverse(const IndicialChart& chart,
                                                        std::complex<double> z) {
    std::vector<std::complex<double>> diag;
    diag.reserve(chart.roots.size());
    for (const auto& r : chart.roots) {
        if (std::abs(z - r.q_minus) < 1e-12 || std::abs(z - r.q_plus) < 1e-12)
            throw ConstraintError("indicial: evaluation at pole");
        diag.push_back(1.0 / ((z - r.q_plus) * (z - r.q_minus)));
    }
    return diag;
}

namespace {

double distance_to_poles(const IndicialChart& chart, double z) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& r : chart.roots) {
        d = std::min(d, std::abs(z - r.q_minus));
        d = std::min(d, std::abs(z - r.q_plus));
    }
    return d;
}

}  // namespace

ValidationReport validate_parameters_report(const IndicialChart& chart,
                                            const ParameterSet& params) {
    ValidationReport rep;
    const int n = chart.n;
    const double left = 0.5 * (n + 1) - params.gamma - 2.0;  // lower end of I_gamma
    const double qk = chart.root(chart.require_k()).q_minus;

    auto add = [&](const std::string& name, bool pass, double margin,
                   const std::string& detail) {
        rep.checks.push_back({name, pass, margin, detail});
    };

    {
        bool pass = (left > -2.0) && (left < qk);
        double margin = std::min(left + 2.0, qk - left);
        std::ostringstream d;
        d << "-2 < (n+1)/2 - gamma - 2 = " << left << " < q_k^- = " << qk;
        add("gamma_new", pass, margin, d.str());
    }
    {
        double d_hi = distance_to_poles(chart, left + 2.0);
        double d_lo = distance_to_poles(chart, left);
        bool pass = d_hi >= 1e-12 && d_lo >= 1e-12;
        add("pole-hit", pass, std::min(d_hi, d_lo),
            "I_gamma endpoints must avoid the poles of the inverted Mellin symbol");
    }
    {
        bool range_ok = params.p > 1.0 && params.q > 1.0;
        double a = (n + 1) / params.p + 2.0 / params.q;
        double b = left + 4.0 / params.q;
        bool pass = range_ok && a < 1.0 && b < 0.0;
        double margin = std::min(1.0 - a, -b);
        std::ostringstream d;
        d << "(n+1)/p + 2/q = " << a << " < 1 and (n+1)/2 - gamma - 2 + 4/q = " << b << " < 0";
        add("pq", pass, margin, d.str());
    }
    {
        double rhs = -1.0 + (n + 1) / params.p + 2.0 / params.q;
        bool pass = params.s > rhs;
        std::ostringstream d;
        d << "s = " << params.s << " > -1 + (n+1)/p + 2/q = " << rhs;
        add("s", pass, params.s - rhs, d.str());
    }

    rep.ok = std::all_of(rep.checks.begin(), rep.checks.end(),
                         [](const ValidationCheck& c) { return c.pass; });
    if (rep.ok) {
        DomainSpec ds;
        ds.I_lo = left;
        ds.I_hi = left + 2.0;
        for (int j = 1; j <= chart.require_k(); ++j)
            ds.included.push_back({j, chart.root(j).q_minus});
        ds.underline_E0 = true;
        ds.E0_log_free = (n == 1);
        for (const auto& r : chart.roots)
            if (r.q_plus > ds.I_lo && r.q_plus < ds.I_hi && !(n == 1 && r.j == 0))
                ds.excluded_qplus.push_back(r.q_plus);
        ds.target_s = params.s + 2.0;
        ds.target_gamma = params.gamma + 2.0;
        rep.domain = ds;
    }
    return rep;
}

DomainSpec validate_parameters(const IndicialChart& chart, const ParameterSet& params) {
    auto rep = validate_parameters_report(chart, params);
    if (!rep.ok) {
        std::string names;
        for (const auto& c : rep.checks)
            if (!c.pass) names += (names.empty() ? "" : ", ") + c.name;
        throw ConstraintError("indicial: parameter validation failed: " + names);
    }
    return *rep.domain;
}

double gamma_window_midpoint(const IndicialChart& chart) {
    const double qk = chart.root(chart.require_k()).q_minus;
    const double width = qk + 2.0;
    double target = 0.5 * (-2.0 + qk);  // midpoint for (n+1)/2 - gamma - 2
    // dodge I_gamma endpoints and correction boundaries: the window lower end
    // must avoid the poles, the poles shifted by -2 (upper endpoint hits), and
    // the q_j^- - 1 case-split boundaries of the correction operators
    std::vector<double> avoid;
    for (const auto& r : chart.roots) {
        avoid.push_back(r.q_minus);
        avoid.push_back(r.q_minus - 1.0);
        avoid.push_back(r.q_minus - 2.0);
        avoid.push_back(r.q_plus);
        avoid.push_back(r.q_plus - 2.0);
    }
    for (int attempt = 0; attempt < 8; ++attempt) {
        bool clear = true;
        for (double a : avoid)
            if (std::abs(target - a) < width / 100.0) clear = false;
        if (clear) break;
        target -= width / 10.0;
        if (target <= -2.0 + width / 100.0) target = qk - width / 7.0;
    }
    return 0.5 * (chart.n + 1) - 2.0 - target;
}

InterpolationWindow interpolation_window(const IndicialChart& chart,
                                         const ParameterSet& params) {
    InterpolationWindow w;
    const int n = chart.n;
    const double left = 0.5 * (n + 1) - params.gamma - 2.0;
    w.bound = left + 2.0 / params.q + params.epsilon;
    const double qk = chart.root(chart.require_k()).q_minus;
    w.direct = w.bound < qk;

    for (const auto& r : chart.roots)
        if (r.j >= 1 && r.j <= chart.k && std::abs(w.bound - r.q_minus) < 1e-13)
            throw ConstraintError("indicial: window boundary hits a root, adjust epsilon");
    if (w.bound >= 0.0)
        throw ConstraintError("indicial: window bound not below q_0^- = 0, adjust epsilon");
    if (w.bound <= -2.0)
        throw ConstraintError("indicial: window bound below -2");

    int r_idx = 0;
    for (int j = chart.k; j >= 0; --j) {
        if (w.bound < chart.root(j).q_minus) {
            r_idx = j;
            break;
        }
    }
    w.r = r_idx;
    w.s0 = params.s + 2.0 - 2.0 / params.q - params.epsilon;
    const double q1 = chart.root(1).q_minus;
    w.gamma0 = std::min(params.gamma + 2.0 - 2.0 / params.q - params.epsilon,
                        0.5 * (n + 1) - q1 - params.epsilon);
    return w;
}

bool membership_exponent_test(double q_exponent, double sigma, int n) {
    return q_exponent < 0.5 * (n + 1) - sigma;
}

nlohmann::json ValidationReport::to_json() const {
    nlohmann::json j;
    j["ok"] = ok;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks)
        j["checks"].push_back(
            {{"name", c.name}, {"pass", c.pass}, {"margin", c.margin}, {"detail", c.detail}});
    if (domain) {
        const auto& d = *domain;
        nlohmann::json dj;
        dj["I_gamma"] = {d.I_lo, d.I_hi};
        dj["included"] = nlohmann::json::array();
        for (const auto& l : d.included)
            dj["included"].push_back({{"label", "E_q" + std::to_string(l.j) + "^-"},
                                      {"j", l.j},
                                      {"root", l.root}});
        dj["underline_E0"] = d.underline_E0;
        dj["E0_log_free"] = d.E0_log_free;
        dj["excluded_q_plus"] = d.excluded_qplus;
        dj["minimal_space"] = {{"s", d.target_s}, {"gamma", d.target_gamma}};
        j["domain"] = dj;
    }
    return j;
}

}  // namespace conelab
