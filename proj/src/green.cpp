#include "conelab/green.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

namespace conelab {

namespace {

using Complex = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// multiplication-by-H' matrix in eigenbasis coordinates
Eigen::MatrixXd mult_matrix(const SpectrumTable& table, const Eigen::VectorXd& nodal) {
    return table.basis.transpose() *
           (table.weights.cwiseProduct(nodal)).asDiagonal() * table.basis;
}

// Laurent data of T(z) = f0(z-1)^{-1} (diagonal in the eigenbasis) at z = sigma:
// T(z) = R/(z-sigma) + S0 + O(z-sigma).
struct LaurentT {
    Eigen::VectorXd R;   // residue diagonal (zero unless sigma-1 is a root q_i^-)
    Eigen::VectorXd S0;  // zeroth coefficient diagonal
    int pole_entry = -1; // entry index i with q_i^- = sigma - 1, or -1
};

LaurentT laurent_T(const IndicialChart& chart, double sigma) {
    const auto& table = *chart.spectrum;
    const int D = table.total_dim();
    LaurentT out;
    out.R = Eigen::VectorXd::Zero(D);
    out.S0 = Eigen::VectorXd::Zero(D);
    const double w = sigma - 1.0;
    for (const auto& r : chart.roots) {
        const auto& entry = table.entries[r.j];
        bool is_pole = std::abs(w - r.q_minus) < 1e-12;
        for (int m = 0; m < entry.mult; ++m) {
            int col = entry.offset + m;
            if (is_pole) {
                double A = 1.0 / (w - r.q_plus);
                out.R[col] = A;
                out.S0[col] = -A * A;
                out.pole_entry = r.j;
            } else {
                out.S0[col] = 1.0 / ((w - r.q_plus) * (w - r.q_minus));
            }
        }
    }
    return out;
}

const IndicialRoot& label_root(const IndicialChart& chart, int label_j) {
    if (label_j < 0 || label_j >= static_cast<int>(chart.roots.size()))
        throw ConstraintError("green: label is not a pole of the chart");
    return chart.root(label_j);
}

}  // namespace

WarpData WarpData::Make(const SpectrumTable& table, Eigen::VectorXd hprime_nodal,
                        Eigen::MatrixXd delta_prime) {
    WarpData w;
    w.straight = false;
    if (hprime_nodal.size() != table.node_count())
        throw ConstraintError("green: H' nodal size mismatch");
    const int D = table.total_dim();
    if (delta_prime.size() == 0) delta_prime = Eigen::MatrixXd::Zero(D, D);
    if (delta_prime.rows() != D || delta_prime.cols() != D)
        throw ConstraintError("green: Delta' dimension mismatch");
    // no zero-order term: the kernel (locally constant) directions map to 0
    const auto& e0 = table.entries[0];
    for (int m = 0; m < e0.mult; ++m) {
        if (delta_prime.col(e0.offset + m).norm() > 1e-12)
            throw ConstraintError("green: Delta' must annihilate the kernel eigenspace");
    }
    w.hprime_nodal = std::move(hprime_nodal);
    w.delta_prime = std::move(delta_prime);
    return w;
}

AsympExpansion BasisElement::full() const {
    if (correction.empty()) return hat;
    return add(hat, correction);
}

std::vector<AsympExpansion> AsympSpaceBasis::hat_basis() const {
    std::vector<AsympExpansion> out;
    for (const auto& e : elements) out.push_back(e.hat);
    return out;
}

std::vector<AsympExpansion> AsympSpaceBasis::full_basis() const {
    std::vector<AsympExpansion> out;
    for (const auto& e : elements) out.push_back(e.full());
    return out;
}

nlohmann::json AsympSpaceBasis::to_json() const {
    nlohmann::json j;
    j["label_j"] = label_j;
    j["label"] = label;
    j["elements"] = nlohmann::json::array();
    for (const auto& e : elements) {
        nlohmann::json ej;
        ej["hat"] = e.hat.to_json();
        ej["hat_render"] = e.hat.render();
        ej["full_render"] = e.full().render();
        ej["correction"] = e.correction.to_json();
        ej["correction_already_minimal"] = e.correction_already_minimal;
        ej["removable"] = nlohmann::json::array();
        for (const auto& r : e.removable)
            ej["removable"].push_back({{"exponent", r.exponent}, {"entry_j", r.entry_j}});
        j["elements"].push_back(ej);
    }
    return j;
}

std::vector<AsympExpansion> hat_space(const IndicialChart& chart, int label_j, double W) {
    const auto& r = label_root(chart, label_j);
    auto table = chart.spectrum;
    const auto& entry = table->entries[label_j];
    std::vector<AsympExpansion> basis;
    if (label_j == 0) {
        if (chart.n == 1) {
            // double pole: two-parameter family omega (e0 + e1 ln x)
            for (int m = 0; m < entry.mult; ++m) {
                basis.push_back(AsympExpansion::term(table, W, 0.0, 0,
                                                     table->unit_coeff(0, m)));
                basis.push_back(AsympExpansion::term(table, W, 0.0, 1,
                                                     table->unit_coeff(0, m), 3, true));
            }
        } else {
            for (int m = 0; m < entry.mult; ++m)
                basis.push_back(AsympExpansion::term(table, W, 0.0, 0,
                                                     table->unit_coeff(0, m)));
        }
        return basis;
    }
    const double e = -r.q_minus;
    for (int m = 0; m < entry.mult; ++m)
        basis.push_back(AsympExpansion::term(table, W, e, 0, table->unit_coeff(label_j, m)));
    return basis;
}

AsympSpaceBasis full_space(const IndicialChart& chart, const WarpData& warp, int label_j,
                           double gamma, double W) {
    const auto& r = label_root(chart, label_j);
    auto table = chart.spectrum;
    const double sigma = r.q_minus;
    const double I_lo = 0.5 * (chart.n + 1) - gamma - 2.0;
    if (std::abs(sigma - 1.0 - I_lo) < 1e-12)
        throw ConstraintError("green: label-1 sits on the weight boundary, adjust gamma");
    if (W <= 1.0 - sigma)
        throw ConstraintError("green: truncation weight too small for the correction terms");

    AsympSpaceBasis out;
    out.label_j = label_j;
    out.label = sigma;

    auto hats = hat_space(chart, label_j, W);
    const bool already_minimal = (sigma - 1.0 < I_lo);

    if (warp.straight) {
        for (auto& h : hats) {
            BasisElement el;
            el.correction = AsympExpansion::zero(table, W, h.max_log());
            el.hat = std::move(h);
            out.elements.push_back(std::move(el));
        }
        return out;
    }

    Eigen::MatrixXd Hmat = mult_matrix(*table, warp.hprime_nodal);
    Eigen::MatrixXd Dp = warp.delta_prime;
    LaurentT T = laurent_T(chart, sigma);
    Eigen::MatrixXd f1s = -sigma * Hmat + Dp;  // f1 evaluated at sigma

    auto tag_removable = [&](BasisElement& el) {
        for (const auto& t : el.correction.terms()) {
            if (t.log_power != 0) continue;
            for (const auto& rr : chart.roots) {
                if (std::abs(t.exponent + rr.q_minus) >= 1e-10) continue;
                const auto& entry = table->entries[rr.j];
                Eigen::VectorXd block = Eigen::VectorXd::Zero(table->total_dim());
                block.segment(entry.offset, entry.mult) =
                    t.coeff.segment(entry.offset, entry.mult);
                if (block.norm() > 1e-14)
                    el.removable.push_back({t.exponent, rr.j, block});
            }
        }
    };

    const auto& entry = table->entries[label_j];
    if (label_j == 0 && chart.n == 1) {
        // double pole: generators (constant, log) per kernel direction
        for (int m = 0; m < entry.mult; ++m) {
            Eigen::VectorXd e = table->unit_coeff(0, m);
            Eigen::VectorXd Hc = Hmat * e;

            BasisElement c0;
            c0.hat = AsympExpansion::term(table, W, 0.0, 0, e);
            c0.correction = AsympExpansion::zero(table, W);
            c0.correction.add_term(1.0, 0, T.R.cwiseProduct(Hc));
            c0.correction_already_minimal = already_minimal;
            tag_removable(c0);
            out.elements.push_back(std::move(c0));

            BasisElement c1;
            c1.hat = AsympExpansion::term(table, W, 0.0, 1, e, 3, true);
            c1.correction = AsympExpansion::zero(table, W, 3);
            c1.correction.add_term(1.0, 1, T.R.cwiseProduct(Hc));
            c1.correction.add_term(1.0, 0, -T.S0.cwiseProduct(Hc));
            c1.correction_already_minimal = already_minimal;
            tag_removable(c1);
            out.elements.push_back(std::move(c1));
        }
        return out;
    }

    // simple poles (j >= 1, and the tip label for n >= 2 where Delta' and the
    // kernel structure reduce to the same formulas)
    for (int m = 0; m < entry.mult; ++m) {
        Eigen::VectorXd e = table->unit_coeff(label_j, m);
        Eigen::VectorXd f1e = f1s * e;
        Eigen::VectorXd beta0 = T.R.cwiseProduct(Hmat * e) - T.S0.cwiseProduct(f1e);
        Eigen::VectorXd beta_m1 = -T.R.cwiseProduct(f1e);

        BasisElement el;
        el.hat = AsympExpansion::term(table, W, -sigma, 0, e);
        el.correction = AsympExpansion::zero(table, W);
        el.correction.add_term(1.0 - sigma, 0, beta0);
        el.correction.add_term(1.0 - sigma, 1, -beta_m1);
        el.correction_already_minimal = already_minimal;
        tag_removable(el);

        // Theta consistency: corrections start one order above the label
        if (!el.correction.empty() &&
            el.correction.terms().front().exponent < -sigma + 1.0 - 1e-10)
            throw SolverError("green: correction below the Theta threshold");
        out.elements.push_back(std::move(el));
    }
    return out;
}

double default_contour_radius(const IndicialChart& chart) {
    return 0.5 * chart.min_pole_gap();
}

double default_contour_radius_g1(const IndicialChart& chart, int sigma_j) {
    // the correction symbol has additional poles on the shifted lattice
    // {1 + q_i^-+-}: the contour must exclude those as well
    const double sigma = label_root(chart, sigma_j).q_minus;
    double d = std::numeric_limits<double>::infinity();
    for (double q : chart.pole_positions()) {
        if (std::abs(q - sigma) > 1e-12) d = std::min(d, std::abs(q - sigma));
        if (std::abs(q + 1.0 - sigma) > 1e-12) d = std::min(d, std::abs(q + 1.0 - sigma));
    }
    return 0.5 * d;
}

namespace {

// trapezoid contour sum (1/2pi i) \oint F(z) dz on |z - sigma| = eps with the
// integrand evaluated through `eval`, then least-squares fit of the x-ladder
// onto { x^{e_fit}, x^{e_fit} ln x }; terms are emitted at e_base, the fit
// exponent shifted by the x-prefactor the caller multiplies on afterwards.
AsympExpansion contour_fit(SpectrumPtr table, double e_base, double x_prefactor_power,
                           double sigma, double eps, int N, double W,
                           const std::function<Eigen::VectorXcd(Complex)>& eval,
                           bool log_at_zero) {
    const int D = table->total_dim();
    std::vector<double> ladder;
    for (int i = 0; i < 9; ++i) ladder.push_back(std::pow(10.0, -3.0 + 2.0 * i / 8.0));

    // precompute integrand values on the contour nodes
    std::vector<Complex> zs(N);
    std::vector<Eigen::VectorXcd> vals(N);
    for (int k = 0; k < N; ++k) {
        double th = 2.0 * kPi * k / N;
        zs[k] = sigma + eps * Complex(std::cos(th), std::sin(th));
        vals[k] = eval(zs[k]);
    }

    Eigen::MatrixXd samples(ladder.size(), D);
#pragma omp parallel for schedule(static)
    for (int s = 0; s < static_cast<int>(ladder.size()); ++s) {
        double x = ladder[s];
        Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(D);
        for (int k = 0; k < N; ++k) {
            Complex w = (zs[k] - sigma) / static_cast<double>(N);
            Complex xz = std::exp(-zs[k] * std::log(x));
            acc += (w * xz) * vals[k];
        }
        samples.row(s) = acc.real().transpose();
    }

    // fit samples(x) = c0 x^{e_fit} + c1 x^{e_fit} ln x
    const double e_fit = e_base - x_prefactor_power;
    Eigen::MatrixXd design(ladder.size(), 2);
    for (size_t s = 0; s < ladder.size(); ++s) {
        double x = ladder[s];
        design(s, 0) = std::pow(x, e_fit);
        design(s, 1) = std::pow(x, e_fit) * std::log(x);
    }
    Eigen::MatrixXd coeff = design.colPivHouseholderQr().solve(samples);

    AsympExpansion out(table, W, 3, log_at_zero || std::abs(e_base) < 1e-10);
    Eigen::VectorXd c0 = coeff.row(0).transpose();
    Eigen::VectorXd c1 = coeff.row(1).transpose();
    if (c0.norm() > 1e-12) out.add_term(e_base, 0, c0);
    if (c1.norm() > 1e-12) out.add_term(e_base, 1, c1);
    return out;
}

void check_contour_preconditions(const IndicialChart& chart, double sigma, double eps,
                                 int N, bool shifted_lattice) {
    if (N < 64) throw ConstraintError("green: contour needs N >= 64 nodes");
    auto qs = chart.pole_positions();
    for (double q : qs) {
        if (std::abs(q - sigma) > 1e-12 && std::abs(q - sigma) <= eps)
            throw ConstraintError("green: contour encloses multiple poles");
        // the correction symbol is singular on the +1-shifted pole lattice
        if (shifted_lattice && std::abs(q + 1.0 - sigma) > 1e-12 &&
            std::abs(q + 1.0 - sigma) <= eps)
            throw ConstraintError("green: contour encloses multiple poles");
    }
}

Eigen::VectorXcd mellin_eval(const MellinPoly& u, Complex z, int D) {
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(D);
    Complex zp = 1.0;
    for (const auto& c : u) {
        acc += zp * c.cast<Complex>();
        zp *= z;
    }
    return acc;
}

}  // namespace

AsympExpansion contour_quadrature_oracle(const IndicialChart& chart, int sigma_j,
                                         const MellinPoly& u, double eps, int N,
                                         double W) {
    const auto& r = label_root(chart, sigma_j);
    check_contour_preconditions(chart, r.q_minus, eps, N, false);
    auto table = chart.spectrum;
    const int D = table->total_dim();

    auto eval = [&](Complex z) {
        Eigen::VectorXcd v = mellin_eval(u, z, D);
        for (const auto& root : chart.roots) {
            const auto& entry = table->entries[root.j];
            Complex d = 1.0 / ((z - root.q_plus) * (z - root.q_minus));
            for (int m = 0; m < entry.mult; ++m) v[entry.offset + m] *= d;
        }
        return v;
    };
    return contour_fit(table, -r.q_minus, 0.0, r.q_minus, eps, N, W, eval,
                       chart.n == 1 && sigma_j == 0);
}

AsympExpansion contour_quadrature_oracle_g1(const IndicialChart& chart,
                                            const WarpData& warp, int sigma_j,
                                            const MellinPoly& u, double eps, int N,
                                            double W) {
    const auto& r = label_root(chart, sigma_j);
    check_contour_preconditions(chart, r.q_minus, eps, N, true);
    auto table = chart.spectrum;
    const int D = table->total_dim();
    const double sigma = r.q_minus;
    if (warp.straight) return AsympExpansion::zero(table, W);

    Eigen::MatrixXcd Hc = mult_matrix(*table, warp.hprime_nodal).cast<Complex>();
    Eigen::MatrixXcd Dpc = warp.delta_prime.size()
                               ? warp.delta_prime.cast<Complex>()
                               : Eigen::MatrixXcd::Zero(D, D).eval();

    // principal part of f0^{-1} Mu at sigma, available exactly from the
    // eigen structure and the polynomial Mellin data
    const auto& entry = table->entries[sigma_j];
    Eigen::VectorXcd u0 = mellin_eval(u, Complex(sigma, 0.0), D);
    Eigen::VectorXcd principal1 = Eigen::VectorXcd::Zero(D);  // coefficient of 1/(z-sigma)
    Eigen::VectorXcd principal2 = Eigen::VectorXcd::Zero(D);  // coefficient of 1/(z-sigma)^2
    if (chart.n == 1 && sigma_j == 0) {
        // double pole at 0: pi_0 Mu(0)/z^2 + pi_0 Mu'(0)/z
        Eigen::VectorXcd u1 = (u.size() > 1) ? u[1].cast<Complex>().eval()
                                             : Eigen::VectorXcd::Zero(D).eval();
        for (int m = 0; m < entry.mult; ++m) {
            principal2[entry.offset + m] = u0[entry.offset + m];
            principal1[entry.offset + m] = u1[entry.offset + m];
        }
    } else {
        double A = 1.0 / (sigma - r.q_plus);
        for (int m = 0; m < entry.mult; ++m)
            principal1[entry.offset + m] = A * u0[entry.offset + m];
    }

    auto eval = [&](Complex z) {
        Complex dz = z - sigma;
        Eigen::VectorXcd P = principal1 / dz + principal2 / (dz * dz);
        Eigen::VectorXcd f1P = -z * (Hc * P) + Dpc * P;
        // g1 = -T(z) f1(z), T diagonal
        for (const auto& root : chart.roots) {
            const auto& en = table->entries[root.j];
            Complex t = 1.0 / ((z - 1.0 - root.q_plus) * (z - 1.0 - root.q_minus));
            for (int m = 0; m < en.mult; ++m) f1P[en.offset + m] *= -t;
        }
        return f1P;
    };

    // the leading x multiplies the contour integral afterwards
    return contour_fit(table, 1.0 - sigma, 1.0, sigma, eps, N, W, eval, false);
}

}  // namespace conelab
