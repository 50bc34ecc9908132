#include "conelab/norms.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

namespace conelab {

namespace {
constexpr double kPi = std::numbers::pi;
}

void GriddedFunction::validate() const {
    if (r.size() < 3) throw ConstraintError("norms: insufficient grid");
    for (int i = 1; i < r.size(); ++i)
        if (!(r[i] > r[i - 1])) throw ConstraintError("norms: r nodes must increase");
    if (r[r.size() - 1] > 1e-12) throw ConstraintError("norms: r nodes must satisfy x <= 1");
    if (y.size() < 4) throw ConstraintError("norms: insufficient grid");
    if (!(y_period > 0.0)) throw ConstraintError("norms: y period must be positive");
    if (values.rows() != r.size() || values.cols() != y.size())
        throw ConstraintError("norms: value matrix shape mismatch");
    if (!(std::exp(r[0]) > 0.0)) throw ConstraintError("norms: x_min must be positive");
}

namespace {

// d/dr by second-order differences, one-sided at the ends
Eigen::MatrixXd d_dr(const Eigen::MatrixXd& v, double dr) {
    Eigen::MatrixXd out(v.rows(), v.cols());
    const int R = static_cast<int>(v.rows());
    for (int i = 0; i < R; ++i) {
        if (i == 0)
            out.row(i) = (-3.0 * v.row(0) + 4.0 * v.row(1) - v.row(2)) / (2.0 * dr);
        else if (i == R - 1)
            out.row(i) = (3.0 * v.row(R - 1) - 4.0 * v.row(R - 2) + v.row(R - 3)) /
                         (2.0 * dr);
        else
            out.row(i) = (v.row(i + 1) - v.row(i - 1)) / (2.0 * dr);
    }
    return out;
}

// spectral differentiation matrix for a uniform periodic grid
Eigen::MatrixXd spectral_dy(int M, double period) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(M, M);
    // trigonometric interpolation derivative: standard closed form
    for (int i = 0; i < M; ++i) {
        for (int j = 0; j < M; ++j) {
            if (i == j) continue;
            int d = i - j;
            double sign = (d % 2 == 0) ? 1.0 : -1.0;
            if (M % 2 == 0)
                D(i, j) = sign * 0.5 / std::tan(kPi * d / M);
            else
                D(i, j) = sign * 0.5 / std::sin(kPi * d / M);
        }
    }
    return D * (2.0 * kPi / period);
}

struct LadderClassifier {
    // partial integrals I(x_min_j) on a decreasing x ladder
    static DivergenceDiagnosis classify(const std::vector<double>& xs,
                                        const std::vector<double>& Is, double p) {
        DivergenceDiagnosis d;
        d.ladder_x = xs;
        d.partials = Is;
        if (xs.size() < 2) {
            d.verdict = Verdict::indeterminate;
            return d;
        }
        double total = Is.back();
        std::vector<double> incr;
        for (size_t i = 1; i < Is.size(); ++i) incr.push_back(Is[i] - Is[i - 1]);

        // fast accept: already Cauchy at the ladder floor
        double last_rel = incr.back() / std::max(total, 1e-300);
        if (last_rel < 1e-3) {
            d.verdict = Verdict::convergent;
            return d;
        }
        // slope of the increments: decaying -> convergent tail, constant ->
        // logarithmic divergence, growing -> power divergence
        double log_ratio_sum = 0.0;
        int count = 0;
        for (size_t i = 1; i < incr.size(); ++i) {
            if (incr[i] <= 0.0 || incr[i - 1] <= 0.0) continue;
            double step = std::log10(xs[i - 1] / xs[i]);  // decades per rung
            log_ratio_sum += std::log10(incr[i] / incr[i - 1]) / step;
            ++count;
        }
        if (count == 0) {
            d.verdict = Verdict::convergent;
            return d;
        }
        double slope = log_ratio_sum / count;  // log10 increment growth per decade
        if (slope < -0.013) {
            d.verdict = Verdict::convergent;
            return d;
        }
        d.verdict = Verdict::divergent;
        if (slope > 0.013) {
            d.rate_kind = "power";
            d.rate = slope / p;  // observed power of |u| driving the divergence
        } else {
            d.rate_kind = "log";
            d.rate = 0.0;
        }
        return d;
    }
};

}  // namespace

NormResult mellin_norm(const GriddedFunction& u, int s, double gamma, double p, int n,
                       const Cutoff& omega) {
    u.validate();
    if (s < 0) throw ConstraintError("norms: s must be a non-negative integer");
    if (u.r.size() < s + 2 || u.y.size() < s + 2)
        throw ConstraintError("norms: insufficient grid");
    const int R = static_cast<int>(u.r.size());
    const int M = static_cast<int>(u.y.size());
    const double dr = u.r[1] - u.r[0];
    for (int i = 2; i < R; ++i)
        if (std::abs((u.r[i] - u.r[i - 1]) - dr) > 1e-9 * std::max(1.0, std::abs(dr)))
            throw ConstraintError("norms: r grid must be uniform");
    const double dy = u.y_period / M;

    Eigen::MatrixXd Dy = spectral_dy(M, u.y_period);

    // derivative table u_{k,alpha} for k + alpha <= s
    std::vector<std::vector<Eigen::MatrixXd>> deriv(s + 1);
    deriv[0].push_back(u.values);
    for (int a = 1; a <= s; ++a) deriv[0].push_back(deriv[0][a - 1] * Dy.transpose());
    for (int k = 1; k <= s; ++k) {
        deriv[k].resize(s - k + 1);
        for (int a = 0; a <= s - k; ++a) deriv[k][a] = d_dr(deriv[k - 1][a], dr);
    }

    // weight e^{((n+1)/2 - gamma) p r} omega^p and trapezoid weights in r
    Eigen::VectorXd wr(R);
    const double wexp = (0.5 * (n + 1) - gamma) * p;
    for (int i = 0; i < R; ++i) {
        double x = std::exp(u.r[i]);
        double om = u.collar_only ? 1.0 : omega(x);
        wr[i] = std::exp(wexp * u.r[i]) * std::pow(om, p) *
                ((i == 0 || i == R - 1) ? 0.5 : 1.0) * dr;
    }

    // per-node p-th powers summed over the derivative stack, then
    // accumulated from the outer boundary inward so every partial integral
    // over [x_min_j, 1] is a suffix sum
    Eigen::VectorXd row_density = Eigen::VectorXd::Zero(R);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < R; ++i) {
        double acc = 0.0;
        for (int k = 0; k <= s; ++k)
            for (int a = 0; a + k <= s; ++a)
                for (int m = 0; m < M; ++m)
                    acc += std::pow(std::abs(deriv[k][a](i, m)), p);
        row_density[i] = acc * wr[i] * dy * u.y_weight;
    }

    std::vector<double> suffix(R + 1, 0.0);
    for (int i = R - 1; i >= 0; --i) suffix[i] = suffix[i + 1] + row_density[i];

    NormResult out;
    out.value = std::pow(suffix[0], 1.0 / p);

    // ladder of partial integrals at x_min in {1e-2, ..., 1e-6}
    std::vector<double> xs, Is;
    for (int d10 = 2; d10 <= 6; ++d10) {
        double xm = std::pow(10.0, -d10);
        if (xm < u.x_min() * (1.0 - 1e-12)) break;
        // first node with x >= xm
        int idx = static_cast<int>(std::ceil((std::log(xm) - u.r[0]) / dr - 1e-9));
        idx = std::clamp(idx, 0, R - 1);
        xs.push_back(xm);
        Is.push_back(suffix[idx]);
    }
    out.diagnosis = LadderClassifier::classify(xs, Is, p);
    return out;
}

std::vector<MembershipRow> membership_suite(const IndicialChart& chart,
                                            const std::vector<std::pair<double, int>>& terms,
                                            double sigma, double p, int n) {
    auto table = chart.spectrum;
    std::vector<MembershipRow> rows;
    const double boundary = sigma - 0.5 * (n + 1);  // e at the threshold

    for (const auto& [e, l] : terms) {
        MembershipRow row;
        row.exponent = e;
        row.log_power = l;
        row.sigma = sigma;
        if (std::abs(e - boundary) < 1e-10) {
            row.analytic = "indeterminate";
            row.quadrature = "indeterminate";
            row.agree = true;
            rows.push_back(row);
            continue;
        }
        bool analytic_in = membership_exponent_test(-e, sigma, n);
        row.analytic = analytic_in ? "in" : "out";

        // first eigenfunction: the normalized kernel constant
        double e0val = table->has_nodal() ? table->basis(0, 0) : 1.0;
        auto f = [&](double x, double theta) {
            double v = e0val * std::pow(x, e);
            double lx = std::log(x);
            for (int i = 0; i < l; ++i) v *= lx;
            (void)theta;
            return v;
        };
        auto g = sample_collar(0.7e-6, 0.01, 16, 2.0 * kPi,
                               table->cs.kind == CrossSectionKind::circle
                                   ? table->cs.circumference / (2.0 * kPi)
                                   : 1.0,
                               f);
        auto res = mellin_norm(g, 0, sigma, p, n);
        switch (res.diagnosis.verdict) {
            case Verdict::convergent: row.quadrature = "convergent"; break;
            case Verdict::divergent: row.quadrature = "divergent"; break;
            default: row.quadrature = "indeterminate"; break;
        }
        row.agree = (analytic_in && res.diagnosis.verdict == Verdict::convergent) ||
                    (!analytic_in && res.diagnosis.verdict == Verdict::divergent);
        row.value_or_rate = (res.diagnosis.verdict == Verdict::convergent)
                                ? res.value
                                : res.diagnosis.rate;
        rows.push_back(row);
    }
    return rows;
}

std::string membership_csv(const std::vector<MembershipRow>& rows) {
    std::ostringstream os;
    os << "exponent,log_power,sigma,analytic,quadrature,agree,value_or_rate\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.17g", r.exponent);
        os << buf << "," << r.log_power << ",";
        std::snprintf(buf, sizeof(buf), "%.17g", r.sigma);
        os << buf << "," << r.analytic << "," << r.quadrature << ","
           << (r.agree ? "yes" : "no") << ",";
        std::snprintf(buf, sizeof(buf), "%.17g", r.value_or_rate);
        os << buf << "\n";
    }
    return os.str();
}

SubmultReport submultiplicativity_smoke(const std::vector<GriddedFunction>& us,
                                        const std::vector<GriddedFunction>& vs, int s,
                                        double gamma, double p, int n) {
    if (us.size() != vs.size())
        throw ConstraintError("norms: sample lists must have equal length");
    SubmultReport rep;
    for (size_t i = 0; i < us.size(); ++i) {
        const auto& u = us[i];
        const auto& v = vs[i];
        auto nu = mellin_norm(u, s, gamma, p, n);
        auto nv = mellin_norm(v, s, gamma, p, n);
        if (nu.diagnosis.verdict != Verdict::convergent ||
            nv.diagnosis.verdict != Verdict::convergent)
            throw ConstraintError("norms: submultiplicativity requires convergent factors");
        if (u.values.rows() != v.values.rows() || u.values.cols() != v.values.cols())
            throw ConstraintError("norms: factor grids must match");
        GriddedFunction uv = u;
        uv.values = u.values.cwiseProduct(v.values);
        auto nuv = mellin_norm(uv, s, gamma, p, n);
        double ratio = nuv.value / (nu.value * nv.value);
        rep.ratios.push_back(ratio);
        rep.max_ratio = std::max(rep.max_ratio, ratio);
    }
    return rep;
}

GriddedFunction sample_collar(double x_min, double dr, int y_nodes, double y_period,
                              double y_weight,
                              const std::function<double(double, double)>& f) {
    GriddedFunction g;
    const int R = static_cast<int>(std::ceil(-std::log(x_min) / dr)) + 1;
    g.r.resize(R);
    for (int i = 0; i < R; ++i) g.r[i] = std::log(x_min) + i * dr;
    // keep the last node at exactly x = 1
    g.r = g.r.array() - g.r[R - 1];
    g.y.resize(y_nodes);
    for (int m = 0; m < y_nodes; ++m) g.y[m] = m * y_period / y_nodes;
    g.y_period = y_period;
    g.y_weight = y_weight;
    g.values.resize(R, y_nodes);
    for (int i = 0; i < R; ++i)
        for (int m = 0; m < y_nodes; ++m)
            g.values(i, m) = f(std::exp(g.r[i]), g.y[m]);
    return g;
}

}  // namespace conelab
