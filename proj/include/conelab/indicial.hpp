#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "conelab/spectrum.hpp"

namespace conelab {

/// One pair of indicial roots q_j^+- = (n-1)/2 +- sqrt(((n-1)/2)^2 - lambda_j).
/// Exact rationals are carried along when the eigenvalue admits them
/// (spheres, lambda_0 = 0).
struct IndicialRoot {
    int j = 0;
    double q_minus = 0.0;
    double q_plus = 0.0;
    std::optional<Rational> q_minus_exact;
    std::optional<Rational> q_plus_exact;
    int pole_order = 1;  // 2 exactly for n = 1, j = 0
};

/// Indicial data of the cone Laplacian: roots, pole structure, and the
/// threshold index k (largest j with q_j^- > -2).
struct IndicialChart {
    int n = 1;
    std::vector<IndicialRoot> roots;
    // k is certified only when the table reaches a root with q^- <= -2.
    int k = -1;
    bool k_certified = false;
    SpectrumPtr spectrum;

    /// k, or a ConstraintError when the table was too short to certify it.
    int require_k() const;
    const IndicialRoot& root(int j) const;
    /// All distinct pole positions of the inverted Mellin symbol, sorted.
    std::vector<double> pole_positions() const;
    double min_pole_gap() const;
    bool is_pole(double z, double tol = 1e-12) const;
    nlohmann::json to_json() const;
};

/// Weight/integrability parameters of the evolution setting.
struct ParameterSet {
    double gamma = 0.0;
    double s = 1.0;
    double p = 8.0;
    double q = 40.0;
    double epsilon = 1e-2;
};

struct DomainLabelE {
    int j;
    double root;  // q_j^-
};

/// Composition of the fixed extension's domain: the weight interval, the
/// asymptotic labels it includes, and the growth labels it excludes (these
/// carry the zero space).
struct DomainSpec {
    double I_lo = 0.0, I_hi = 0.0;
    std::vector<DomainLabelE> included;  // E_{q_j^-}, j = 1..k
    bool underline_E0 = true;
    bool E0_log_free = false;  // n = 1: log-free subspace of the double-pole space
    std::vector<double> excluded_qplus;
    double target_s = 0.0, target_gamma = 0.0;  // minimal space (s+2, gamma+2)
};

struct ValidationCheck {
    std::string name;   // "gamma_new", "pq", "s", "pole-hit"
    bool pass = false;
    double margin = 0.0;
    std::string detail;
};

struct ValidationReport {
    bool ok = false;
    std::vector<ValidationCheck> checks;
    std::optional<DomainSpec> domain;
    nlohmann::json to_json() const;
};

/// Indicial roots from a spectrum table. The table must reach below the -2
/// threshold so k is certified.
IndicialChart indicial_roots(SpectrumPtr spec, int n);

/// Eigenbasis-diagonal values of the inverted Mellin symbol,
/// 1 / ((z - q_j^+)(z - q_j^-)) per entry j.
std::vector<std::complex<double>> mellin_symbol_inverse(const IndicialChart& chart,
                                                        std::complex<double> z);

/// Non-throwing constraint evaluation with margins.
ValidationReport validate_parameters_report(const IndicialChart& chart,
                                            const ParameterSet& params);

/// Throwing variant: returns the domain spec or raises ConstraintError naming
/// every violated constraint.
DomainSpec validate_parameters(const IndicialChart& chart, const ParameterSet& params);

/// Midpoint of the admissible gamma window (a convenience default).
double gamma_window_midpoint(const IndicialChart& chart);

struct InterpolationWindow {
    int r = 0;
    bool direct = false;  // window bound sits below q_k^-
    double bound = 0.0;   // (n+1)/2 - gamma - 2 + 2/q + eps
    double s0 = 0.0;
    double gamma0 = 0.0;
};

/// Index r with max{-2, q_{r+1}^-} < bound < q_r^-, plus the target
/// smoothness/weight pair of the interpolation embedding.
InterpolationWindow interpolation_window(const IndicialChart& chart,
                                         const ParameterSet& params);

/// Direct analytic membership criterion: x^{-q} profiles lie in the weighted
/// space of weight sigma iff q < (n+1)/2 - sigma.
bool membership_exponent_test(double q_exponent, double sigma, int n);

}  // namespace conelab
