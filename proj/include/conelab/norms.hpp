#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "conelab/cutoff.hpp"
#include "conelab/indicial.hpp"

namespace conelab {

/// Collar-gridded function: log-radial nodes (r = ln x) times a uniform
/// periodic cross-section grid. When collar_only is set the stored values
/// already carry the cutoff and the norm does not apply it again.
struct GriddedFunction {
    Eigen::VectorXd r;       // strictly increasing, r.back() <= 0
    Eigen::VectorXd y;       // uniform periodic parameter on [0, y_period)
    double y_period = 0.0;
    double y_weight = 1.0;   // measure density: ds = y_weight dy
    Eigen::MatrixXd values;  // r.size() x y.size()
    bool collar_only = false;

    void validate() const;
    double x_min() const { return std::exp(r[0]); }
};

enum class Verdict { convergent, divergent, indeterminate };

struct DivergenceDiagnosis {
    Verdict verdict = Verdict::indeterminate;
    std::string rate_kind;  // "", "log", "power"
    double rate = 0.0;      // observed power of the partial-integral growth
    std::vector<double> ladder_x;     // partial-integral lower limits
    std::vector<double> partials;     // corresponding p-th-power integrals
};

struct NormResult {
    double value = 0.0;  // p-th root of the summed seminorms
    DivergenceDiagnosis diagnosis;
};

/// Weighted collar norm: sum over k + alpha <= s of
/// || x^{(n+1)/2-gamma} omega (x d/dx)^k D_y^alpha u ||_{L^p(dx dy / x)},
/// quadrature in r (where x d/dx = d/dr) with spectral differentiation in y.
/// Divergence is diagnosed from the partial integrals on the x_min ladder.
NormResult mellin_norm(const GriddedFunction& u, int s, double gamma, double p, int n,
                       const Cutoff& omega = Cutoff{});

struct MembershipRow {
    double exponent = 0.0;
    int log_power = 0;
    double sigma = 0.0;
    std::string analytic;    // "in", "out", "indeterminate"
    std::string quadrature;  // "convergent", "divergent", "indeterminate"
    bool agree = false;
    double value_or_rate = 0.0;
};

/// For each term builds omega x^e ln^l x times the first eigenfunction and
/// cross-checks the quadrature divergence diagnosis against the analytic
/// membership criterion. Boundary cases are reported indeterminate.
std::vector<MembershipRow> membership_suite(const IndicialChart& chart,
                                            const std::vector<std::pair<double, int>>& terms,
                                            double sigma, double p, int n);

std::string membership_csv(const std::vector<MembershipRow>& rows);

struct SubmultReport {
    std::vector<double> ratios;
    double max_ratio = 0.0;
};

/// ||uv|| / (||u|| ||v||) over the given pairs; inputs must be convergent in
/// the same norm.
SubmultReport submultiplicativity_smoke(const std::vector<GriddedFunction>& us,
                                        const std::vector<GriddedFunction>& vs, int s,
                                        double gamma, double p, int n);

/// Uniform log-radial/periodic grid factory for collar samples of
/// f(x, y).
GriddedFunction sample_collar(double x_min, double dr, int y_nodes, double y_period,
                              double y_weight,
                              const std::function<double(double, double)>& f);

}  // namespace conelab
