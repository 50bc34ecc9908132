#pragma once

#include <map>
#include <string>
#include <vector>

#include "conelab/indicial.hpp"
#include "conelab/spectrum.hpp"

namespace conelab {

/// One term a(y) * x^e * ln^l(x), the cross-section coefficient a given in
/// eigenbasis coordinates of the owning spectrum table.
struct AsympTerm {
    double exponent = 0.0;  // e >= 0, the profile is x^e = x^{-q} with q = -e
    int log_power = 0;
    Eigen::VectorXd coeff;
};

/// Truncated formal sum of asymptotic terms: the working representation of
/// the algebra generated by the tip profiles. Terms with exponent >= W are
/// dropped (recorded as O(x^W)); log powers are capped at L. Terms are kept
/// sorted by (e ascending, l descending) with merged keys.
///
/// Coefficient products are evaluated nodally on the table's quadrature grid
/// and projected back, so the coefficient space is the fixed eigenbasis span.
/// Operations that rely on exact telescoping (inversion, real powers) are
/// exact in the truncated algebra when the leading coefficient is locally
/// constant, the situation the domain labels produce.
class AsympExpansion {
public:
    AsympExpansion() = default;
    AsympExpansion(SpectrumPtr table, double truncation_weight, int max_log = 3,
                   bool allow_log_at_zero = false);

    static AsympExpansion zero(SpectrumPtr table, double W, int max_log = 3);
    /// Pointwise-constant function with the given value.
    static AsympExpansion constant(SpectrumPtr table, double W, double value,
                                   int max_log = 3);
    /// Single term x^e ln^l x with the given eigenbasis coefficient.
    static AsympExpansion term(SpectrumPtr table, double W, double e, int l,
                               const Eigen::VectorXd& coeff, int max_log = 3,
                               bool allow_log_at_zero = false);

    const std::vector<AsympTerm>& terms() const { return terms_; }
    SpectrumPtr table() const { return table_; }
    double truncation_weight() const { return W_; }
    int max_log() const { return L_; }
    bool allow_log_at_zero() const { return allow_log_at_zero_; }
    bool empty() const { return terms_.empty(); }

    /// Inserts (merging keys, pruning null coefficients).
    void add_term(double e, int l, const Eigen::VectorXd& coeff);

    /// Nodal values of the expansion at radial position x.
    Eigen::VectorXd eval_nodal(double x) const;

    /// Smallest positive exponent present (infinity if none).
    double min_positive_exponent() const;

    nlohmann::json to_json() const;
    static AsympExpansion from_json(SpectrumPtr table, const nlohmann::json& j);

    std::string render() const;

private:
    friend AsympExpansion add(const AsympExpansion&, const AsympExpansion&);
    friend AsympExpansion multiply(const AsympExpansion&, const AsympExpansion&);

    SpectrumPtr table_;
    double W_ = 2.0;
    int L_ = 3;
    bool allow_log_at_zero_ = false;
    std::vector<AsympTerm> terms_;
};

/// Termwise sum. Mismatched truncation weights truncate to the smaller one.
AsympExpansion add(const AsympExpansion& a, const AsympExpansion& b);
AsympExpansion scale(const AsympExpansion& a, double factor);

/// Term-list convolution: exponents add, log powers add, cross-section
/// coefficients multiply pointwise on the quadrature grid.
AsympExpansion multiply(const AsympExpansion& a, const AsympExpansion& b);

/// Inverse via the finite geometric series a = a0(1+y),
/// a^{-1} = a0^{-1} sum_i (-y)^i, truncated so the remainder falls beyond W.
AsympExpansion invert(const AsympExpansion& a);

/// Real power a^theta via the binomial series around the leading coefficient,
/// which must be strictly positive on the cross-section.
AsympExpansion real_power(const AsympExpansion& a, double theta);

/// Partition of terms by weight-space membership.
struct WeightPartition {
    std::vector<int> constant;            // (e=0, l=0) terms
    std::vector<int> flat;                // inside the weighted space at sigma
    std::map<int, std::vector<int>> labeled;  // j -> terms matching x^{-q_j^-}
    std::vector<int> unmatched;
};

WeightPartition weight_classify(const AsympExpansion& a, const IndicialChart& chart,
                                double sigma);

/// Default truncation weight 2 + |q_k^-|: all domain exponents survive one
/// multiplication.
double default_truncation_weight(const IndicialChart& chart);

/// Largest coefficient-wise deviation between two expansions over the union
/// of their term keys.
double max_coeff_diff(const AsympExpansion& a, const AsympExpansion& b);

}  // namespace conelab
