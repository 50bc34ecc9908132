#include "conelab/asymp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace conelab {

namespace {
constexpr double kKeyTol = 1e-10;   // exponent key-merge tolerance
constexpr double kPruneTol = 1e-14; // coefficient-norm pruning
}

AsympExpansion::AsympExpansion(SpectrumPtr table, double truncation_weight, int max_log,
                               bool allow_log_at_zero)
    : table_(std::move(table)), W_(truncation_weight), L_(max_log),
      allow_log_at_zero_(allow_log_at_zero) {
    if (!table_) throw ConstraintError("asymp: null spectrum table");
    if (!table_->has_nodal())
        throw ConstraintError("asymp: table without nodal representation");
    if (!(W_ > 0.0)) throw ConstraintError("asymp: truncation weight must be positive");
}

AsympExpansion AsympExpansion::zero(SpectrumPtr table, double W, int max_log) {
    return AsympExpansion(std::move(table), W, max_log);
}

AsympExpansion AsympExpansion::constant(SpectrumPtr table, double W, double value,
                                        int max_log) {
    AsympExpansion a(table, W, max_log);
    Eigen::VectorXd ones = Eigen::VectorXd::Constant(table->node_count(), value);
    a.add_term(0.0, 0, table->project(ones));
    return a;
}

AsympExpansion AsympExpansion::term(SpectrumPtr table, double W, double e, int l,
                                    const Eigen::VectorXd& coeff, int max_log,
                                    bool allow_log_at_zero) {
    AsympExpansion a(table, W, max_log, allow_log_at_zero);
    a.add_term(e, l, coeff);
    return a;
}

void AsympExpansion::add_term(double e, int l, const Eigen::VectorXd& coeff) {
    if (e < -kKeyTol) throw ConstraintError("asymp: negative exponent");
    if (std::abs(e) < kKeyTol) e = 0.0;
    if (l < 0) throw ConstraintError("asymp: negative log power");
    if (l > L_) throw ConstraintError("asymp: increase max_log");
    if (e == 0.0 && l > 0 && !allow_log_at_zero_)
        throw ConstraintError("asymp: log at zero exponent requires the double-pole space");
    if (coeff.size() != table_->total_dim())
        throw ConstraintError("asymp: coefficient dimension mismatch");
    if (e >= W_ - kKeyTol) return;  // truncated, O(x^W)
    if (coeff.norm() < kPruneTol) return;

    for (auto& t : terms_) {
        if (std::abs(t.exponent - e) < kKeyTol && t.log_power == l) {
            t.coeff += coeff;
            if (t.coeff.norm() < kPruneTol) {
                terms_.erase(terms_.begin() + (&t - terms_.data()));
            }
            return;
        }
    }
    AsympTerm t{e, l, coeff};
    auto pos = std::lower_bound(
        terms_.begin(), terms_.end(), t, [](const AsympTerm& x, const AsympTerm& y) {
            if (std::abs(x.exponent - y.exponent) >= kKeyTol)
                return x.exponent < y.exponent;
            return x.log_power > y.log_power;
        });
    terms_.insert(pos, std::move(t));
}

Eigen::VectorXd AsympExpansion::eval_nodal(double x) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(table_->node_count());
    double lx = std::log(x);
    for (const auto& t : terms_) {
        double amp = std::pow(x, t.exponent);
        for (int i = 0; i < t.log_power; ++i) amp *= lx;
        out += amp * table_->to_nodal(t.coeff);
    }
    return out;
}

double AsympExpansion::min_positive_exponent() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& t : terms_)
        if (t.exponent > kKeyTol) m = std::min(m, t.exponent);
    return m;
}

nlohmann::json AsympExpansion::to_json() const {
    nlohmann::json j;
    j["truncation_weight"] = W_;
    j["max_log"] = L_;
    j["allow_log_at_zero"] = allow_log_at_zero_;
    j["terms"] = nlohmann::json::array();
    for (const auto& t : terms_) {
        std::vector<double> c(t.coeff.data(), t.coeff.data() + t.coeff.size());
        j["terms"].push_back({{"e", t.exponent}, {"l", t.log_power}, {"coeff", c}});
    }
    return j;
}

AsympExpansion AsympExpansion::from_json(SpectrumPtr table, const nlohmann::json& j) {
    AsympExpansion a(table, j.at("truncation_weight").get<double>(),
                     j.at("max_log").get<int>(), j.at("allow_log_at_zero").get<bool>());
    for (const auto& tj : j.at("terms")) {
        auto c = tj.at("coeff").get<std::vector<double>>();
        Eigen::VectorXd coeff = Eigen::Map<Eigen::VectorXd>(c.data(), c.size());
        a.add_term(tj.at("e").get<double>(), tj.at("l").get<int>(), coeff);
    }
    return a;
}

std::string AsympExpansion::render() const {
    if (terms_.empty()) return "O(x^" + std::to_string(W_) + ")";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms_) {
        for (const auto& entry : table_->entries) {
            Eigen::VectorXd block = t.coeff.segment(entry.offset, entry.mult);
            double norm = block.norm();
            if (norm < kPruneTol) continue;
            double lead = 0.0;
            for (int i = 0; i < block.size(); ++i)
                if (std::abs(block[i]) > 1e-14) { lead = block[i]; break; }
            double amp = (lead < 0.0) ? -norm : norm;
            if (!first) os << " + ";
            first = false;
            os << amp;
            if (t.exponent != 0.0) os << "*x^" << t.exponent;
            if (t.log_power == 1) os << "*ln(x)";
            else if (t.log_power > 1) os << "*ln^" << t.log_power << "(x)";
            os << "*[mode " << entry.j << "]";
        }
    }
    os << " + O(x^" << W_ << ")";
    return os.str();
}

namespace {

void require_compatible(const AsympExpansion& a, const AsympExpansion& b) {
    if (a.table() != b.table())
        throw ConstraintError("asymp: expansions built over different spectrum tables");
}

}  // namespace

AsympExpansion add(const AsympExpansion& a, const AsympExpansion& b) {
    require_compatible(a, b);
    double W = std::min(a.truncation_weight(), b.truncation_weight());
    AsympExpansion out(a.table(), W, std::max(a.max_log(), b.max_log()),
                       a.allow_log_at_zero() || b.allow_log_at_zero());
    for (const auto& t : a.terms()) out.add_term(t.exponent, t.log_power, t.coeff);
    for (const auto& t : b.terms()) out.add_term(t.exponent, t.log_power, t.coeff);
    return out;
}

AsympExpansion scale(const AsympExpansion& a, double factor) {
    AsympExpansion out(a.table(), a.truncation_weight(), a.max_log(),
                       a.allow_log_at_zero());
    for (const auto& t : a.terms()) out.add_term(t.exponent, t.log_power, factor * t.coeff);
    return out;
}

AsympExpansion multiply(const AsympExpansion& a, const AsympExpansion& b) {
    require_compatible(a, b);
    const auto& table = *a.table();
    double W = std::min(a.truncation_weight(), b.truncation_weight());
    AsympExpansion out(a.table(), W, std::max(a.max_log(), b.max_log()),
                       a.allow_log_at_zero() || b.allow_log_at_zero());

    // nodal values of every coefficient, computed once
    std::vector<Eigen::VectorXd> an, bn;
    an.reserve(a.terms().size());
    bn.reserve(b.terms().size());
    for (const auto& t : a.terms()) an.push_back(table.to_nodal(t.coeff));
    for (const auto& t : b.terms()) bn.push_back(table.to_nodal(t.coeff));

    for (size_t i = 0; i < a.terms().size(); ++i) {
        for (size_t j = 0; j < b.terms().size(); ++j) {
            double e = a.terms()[i].exponent + b.terms()[j].exponent;
            if (e >= W - 1e-10) continue;
            int l = a.terms()[i].log_power + b.terms()[j].log_power;
            Eigen::VectorXd prod = an[i].cwiseProduct(bn[j]);
            out.add_term(e, l, table.project(prod));
        }
    }
    return out;
}

namespace {

// Leading (e=0, l=0) coefficient for inversion/powers; a log at exponent
// zero is unbounded near the tip, so no such term may be present.
const AsympTerm* leading_constant_term(const AsympExpansion& a, const char* err) {
    const AsympTerm* lead = nullptr;
    for (const auto& t : a.terms()) {
        if (t.exponent == 0.0) {
            if (t.log_power > 0) throw ConstraintError(err);
            lead = &t;
        }
    }
    if (!lead) throw ConstraintError(err);
    return lead;
}

}  // namespace

AsympExpansion invert(const AsympExpansion& a) {
    const auto& table = *a.table();
    const AsympTerm* lead = leading_constant_term(a, "asymp: not invertible in C(B)");
    Eigen::VectorXd a0 = table.to_nodal(lead->coeff);
    if (a0.cwiseAbs().minCoeff() <= 1e-10)
        throw ConstraintError("asymp: not invertible in C(B)");
    Eigen::VectorXd r0 = a0.cwiseInverse();
    Eigen::VectorXd r0_coeff = table.project(r0);

    // y = a0^{-1} (a - a0): only positive-exponent terms
    AsympExpansion neg_y(a.table(), a.truncation_weight(), a.max_log(),
                         a.allow_log_at_zero());
    for (const auto& t : a.terms()) {
        if (&t == lead) continue;
        neg_y.add_term(t.exponent, t.log_power,
                       -table.project(table.to_nodal(t.coeff).cwiseProduct(r0)));
    }

    AsympExpansion series = AsympExpansion::constant(a.table(), a.truncation_weight(), 1.0,
                                                     a.max_log());
    if (!neg_y.empty()) {
        double e_min = neg_y.min_positive_exponent();
        int N = static_cast<int>(std::ceil(a.truncation_weight() / e_min));
        AsympExpansion power = series;  // (-y)^0 = 1
        for (int i = 1; i <= N && !power.empty(); ++i) {
            power = multiply(power, neg_y);
            series = add(series, power);
        }
    }
    // a^{-1} = a0^{-1} * series
    AsympExpansion out(a.table(), a.truncation_weight(), a.max_log(),
                       a.allow_log_at_zero());
    for (const auto& t : series.terms())
        out.add_term(t.exponent, t.log_power,
                     table.project(table.to_nodal(t.coeff).cwiseProduct(r0)));
    return out;
}

AsympExpansion real_power(const AsympExpansion& a, double theta) {
    const auto& table = *a.table();
    const AsympTerm* lead = leading_constant_term(a, "asymp: branch undefined");
    Eigen::VectorXd a0 = table.to_nodal(lead->coeff);
    if (a0.minCoeff() <= 1e-10)
        throw ConstraintError("asymp: branch undefined");
    Eigen::VectorXd r0 = a0.cwiseInverse();
    Eigen::VectorXd a0_pow = a0.array().pow(theta).matrix();

    AsympExpansion y(a.table(), a.truncation_weight(), a.max_log(),
                     a.allow_log_at_zero());
    for (const auto& t : a.terms()) {
        if (&t == lead) continue;
        y.add_term(t.exponent, t.log_power,
                   table.project(table.to_nodal(t.coeff).cwiseProduct(r0)));
    }

    // sum_i binom(theta, i) y^i
    AsympExpansion series = AsympExpansion::constant(a.table(), a.truncation_weight(), 1.0,
                                                     a.max_log());
    if (!y.empty()) {
        double e_min = y.min_positive_exponent();
        int N = static_cast<int>(std::ceil(a.truncation_weight() / e_min));
        AsympExpansion power = series;
        double binom = 1.0;
        for (int i = 1; i <= N && !power.empty(); ++i) {
            binom *= (theta - (i - 1)) / i;
            power = multiply(power, y);
            series = add(series, scale(power, binom));
            if (binom == 0.0) break;  // integer theta: series terminates
        }
    }
    AsympExpansion out(a.table(), a.truncation_weight(), a.max_log(),
                       a.allow_log_at_zero());
    for (const auto& t : series.terms())
        out.add_term(t.exponent, t.log_power,
                     table.project(table.to_nodal(t.coeff).cwiseProduct(a0_pow)));
    return out;
}

WeightPartition weight_classify(const AsympExpansion& a, const IndicialChart& chart,
                                double sigma) {
    WeightPartition part;
    const auto& terms = a.terms();
    for (int i = 0; i < static_cast<int>(terms.size()); ++i) {
        const auto& t = terms[i];
        if (t.exponent == 0.0 && t.log_power == 0) {
            part.constant.push_back(i);
            continue;
        }
        if (membership_exponent_test(-t.exponent, sigma, chart.n)) {
            part.flat.push_back(i);
            continue;
        }
        bool matched = false;
        for (const auto& r : chart.roots) {
            if (std::abs(t.exponent + r.q_minus) < 1e-10) {
                part.labeled[r.j].push_back(i);
                matched = true;
                break;
            }
        }
        if (!matched) part.unmatched.push_back(i);
    }
    return part;
}

double default_truncation_weight(const IndicialChart& chart) {
    return 2.0 + std::abs(chart.root(chart.require_k()).q_minus);
}

double max_coeff_diff(const AsympExpansion& a, const AsympExpansion& b) {
    double worst = 0.0;
    auto scan = [&](const AsympExpansion& u, const AsympExpansion& v) {
        for (const auto& t : u.terms()) {
            const AsympTerm* match = nullptr;
            for (const auto& s : v.terms())
                if (std::abs(s.exponent - t.exponent) < 1e-10 && s.log_power == t.log_power)
                    match = &s;
            double d = match ? (t.coeff - match->coeff).cwiseAbs().maxCoeff()
                             : t.coeff.cwiseAbs().maxCoeff();
            worst = std::max(worst, d);
        }
    };
    scan(a, b);
    scan(b, a);
    return worst;
}

}  // namespace conelab
