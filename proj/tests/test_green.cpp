#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "conelab/cutoff.hpp"
#include "conelab/green.hpp"

using namespace conelab;

namespace {

IndicialChart chart_circle(double rho, int J = 5) {
    return indicial_roots(spectrum_analytic(CrossSection::CircleRadius(rho), J), 1);
}

IndicialChart chart_sphere(int J = 4) {
    return indicial_roots(spectrum_analytic(CrossSection::Sphere(2), J), 2);
}

// synthetic smooth warp on a 1-d cross-section
WarpData circle_warp(const SpectrumTable& t, double mu = 0.4) {
    Eigen::VectorXd h(t.node_count());
    for (int i = 0; i < t.node_count(); ++i) {
        double th = t.node_theta[i];
        h[i] = 0.8 + 0.5 * std::cos(th) + 0.3 * std::sin(2.0 * th);
    }
    Eigen::MatrixXd dp = (mu * t.eigenvalue_diagonal()).asDiagonal();
    return WarpData::Make(t, h, dp);
}

WarpData sphere_warp(const SpectrumTable& t) {
    Eigen::VectorXd h(t.node_count());
    for (int i = 0; i < t.node_count(); ++i)
        h[i] = 0.3 + real_sph_harm(1, 0, 0, t.node_phi[i], t.node_theta[i]);
    Eigen::MatrixXd dp = (0.25 * t.eigenvalue_diagonal()).asDiagonal();
    return WarpData::Make(t, h, dp);
}

// Mellin data normalized so the G0 residue equals the hat generator:
// simple poles need Mu = (sigma - q_j^+) e_m; the n=1 double pole reaches the
// constant generator through z*e_m and the log generator through -e_m.
MellinPoly mellin_for_hat(const IndicialChart& chart, int label_j, int m,
                          bool log_generator) {
    auto table = chart.spectrum;
    const auto& r = chart.root(label_j);
    Eigen::VectorXd e = table->unit_coeff(label_j, m);
    if (label_j == 0 && chart.n == 1) {
        if (log_generator) return {-e};
        return {Eigen::VectorXd::Zero(table->total_dim()), e};
    }
    return {(r.q_minus - r.q_plus) * e};
}

}  // namespace

TEST_CASE("hat_space: simple poles carry x^{-q} profiles") {
    auto chart = chart_sphere();
    auto basis = hat_space(chart, 1, 3.0);
    REQUIRE(basis.size() == 3);  // dim E_1 on S^2
    for (const auto& b : basis) {
        REQUIRE(b.terms().size() == 1);
        CHECK(b.terms()[0].exponent == doctest::Approx(1.0));  // -q_1^- = 1
        CHECK(b.terms()[0].log_power == 0);
    }
}

TEST_CASE("hat_space: n=1 tip label is the (constant, log) family") {
    auto chart = chart_circle(1.0);
    auto basis = hat_space(chart, 0, 2.0);
    REQUIRE(basis.size() == 2);
    CHECK(basis[0].terms()[0].log_power == 0);
    CHECK(basis[0].terms()[0].exponent == 0.0);
    CHECK(basis[1].terms()[0].log_power == 1);
    CHECK(basis[1].terms()[0].exponent == 0.0);
}

TEST_CASE("hat_space rejects labels that are not poles") {
    auto chart = chart_circle(1.0);
    CHECK_THROWS_WITH_AS(hat_space(chart, 17, 2.0), doctest::Contains("not a pole"),
                         ConstraintError);
}

TEST_CASE("G0 oracle: simple pole residue on the sphere cone") {
    auto chart = chart_sphere();
    auto table = chart.spectrum;
    // Mu = e_1: expect x * e_1 / (q_1^- - q_1^+) = -x e_1 / 3
    MellinPoly u = {table->unit_coeff(1, 0)};
    auto got = contour_quadrature_oracle(chart, 1, u, default_contour_radius(chart), 128,
                                         3.0);
    REQUIRE(got.terms().size() == 1);
    CHECK(got.terms()[0].exponent == doctest::Approx(1.0));
    Eigen::VectorXd expect = table->unit_coeff(1, 0) / (-1.0 - 2.0);
    CHECK((got.terms()[0].coeff - expect).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("G0 oracle: the n=1 double pole produces the log structure") {
    auto chart = chart_circle(1.0);
    auto table = chart.spectrum;
    Eigen::VectorXd e0 = table->unit_coeff(0, 0);
    // Mu(z) = 2 e0 + 3 z e0 -> -2 ln(x) e0 + 3 e0
    MellinPoly u = {2.0 * e0, 3.0 * e0};
    auto got = contour_quadrature_oracle(chart, 0, u, default_contour_radius(chart), 128,
                                         2.0);
    REQUIRE(got.terms().size() == 2);
    // sorted by (e asc, l desc): the log term comes first
    CHECK(got.terms()[0].log_power == 1);
    CHECK((got.terms()[0].coeff + 2.0 * e0).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(got.terms()[1].log_power == 0);
    CHECK((got.terms()[1].coeff - 3.0 * e0).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("G0 oracle: zero Mellin data gives the zero expansion") {
    auto chart = chart_circle(1.3);
    MellinPoly u = {Eigen::VectorXd::Zero(chart.spectrum->total_dim())};
    auto got = contour_quadrature_oracle(chart, 1, u, default_contour_radius(chart), 128,
                                         2.0);
    CHECK(got.empty());
}

TEST_CASE("contour guards: radius and node count") {
    auto chart = chart_circle(1.0);
    MellinPoly u = {chart.spectrum->unit_coeff(1, 0)};
    CHECK_THROWS_WITH_AS(contour_quadrature_oracle(chart, 1, u, 1.5, 128, 2.0),
                         doctest::Contains("encloses multiple poles"), ConstraintError);
    CHECK_THROWS_AS(contour_quadrature_oracle(chart, 1, u, 0.4, 32, 2.0), ConstraintError);
}

TEST_CASE("straight cones: full coincides with hat on randomized labels") {
    std::mt19937_64 rng(11);
    std::vector<IndicialChart> charts;
    charts.push_back(chart_circle(0.8));
    charts.push_back(chart_circle(1.0));
    charts.push_back(chart_circle(1.3));
    charts.push_back(chart_sphere());
    for (int trial = 0; trial < 50; ++trial) {
        const auto& chart = charts[trial % charts.size()];
        int label = std::uniform_int_distribution<int>(0, chart.k)(rng);
        double gamma = gamma_window_midpoint(chart);
        auto basis = full_space(chart, WarpData::Straight(), label, gamma,
                                default_truncation_weight(chart));
        for (const auto& el : basis.elements) {
            CHECK(el.correction.empty());
            CHECK(max_coeff_diff(el.full(), el.hat) == 0.0);
        }
    }
}

TEST_CASE("warped full_space matches the contour oracle on every pole") {
    struct Case {
        IndicialChart chart;
        WarpData warp;
    };
    std::vector<Case> cases;
    for (double rho : {0.8, 1.0, 1.3}) {
        auto c = chart_circle(rho);
        auto w = circle_warp(*c.spectrum);
        cases.push_back({std::move(c), std::move(w)});
    }
    {
        auto c = chart_sphere();
        auto w = sphere_warp(*c.spectrum);
        cases.push_back({std::move(c), std::move(w)});
    }

    for (const auto& cs : cases) {
        const auto& chart = cs.chart;
        double gamma = gamma_window_midpoint(chart);
        double W = default_truncation_weight(chart);
        for (int label = 0; label <= chart.k; ++label) {
            double eps = default_contour_radius_g1(chart, label);
            auto basis = full_space(chart, cs.warp, label, gamma, W);
            const bool dbl = (chart.n == 1 && label == 0);
            for (size_t i = 0; i < basis.elements.size(); ++i) {
                int m = dbl ? static_cast<int>(i) / 2 : static_cast<int>(i);
                bool log_gen = dbl && (i % 2 == 1);
                auto u = mellin_for_hat(chart, label, m, log_gen);
                auto g0 = contour_quadrature_oracle(chart, label, u, eps, 128, W);
                auto g1 = contour_quadrature_oracle_g1(chart, cs.warp, label, u, eps, 128, W);
                auto oracle = add(g0, g1);
                CHECK(max_coeff_diff(basis.elements[i].full(), oracle) < 1e-8);
                CHECK(max_coeff_diff(basis.elements[i].hat, g0) < 1e-8);
            }
        }
    }
}

TEST_CASE("Theta pairing: corrections start one order above the label") {
    auto chart = chart_circle(1.3);
    auto warp = circle_warp(*chart.spectrum);
    double gamma = gamma_window_midpoint(chart);
    for (int label = 0; label <= chart.k; ++label) {
        auto basis = full_space(chart, warp, label, gamma,
                                default_truncation_weight(chart));
        CHECK(basis.elements.size() >= 1);
        for (const auto& el : basis.elements) {
            double e_label = el.hat.terms().front().exponent;
            if (el.correction.empty()) continue;
            CHECK(el.correction.terms().front().exponent >= e_label + 1.0 - 1e-10);
        }
    }
}

TEST_CASE("sphere tip label: correction lands in E_1 and is tagged removable") {
    auto chart = chart_sphere();
    auto table = chart.spectrum;
    Eigen::VectorXd h(table->node_count());
    for (int i = 0; i < table->node_count(); ++i)
        h[i] = real_sph_harm(1, 0, 0, table->node_phi[i], table->node_theta[i]);
    auto warp = WarpData::Make(*table, h, {});

    auto basis = full_space(chart, warp, 0, gamma_window_midpoint(chart), 3.0);
    REQUIRE(basis.elements.size() == 1);
    const auto& el = basis.elements[0];
    REQUIRE(el.correction.terms().size() == 1);
    const auto& t = el.correction.terms()[0];
    CHECK(t.exponent == doctest::Approx(1.0));
    CHECK(t.log_power == 0);
    // -x pi_1(H' e_0)/(n+1): component sits on the (l=1, m=0) harmonic
    const auto& e1 = table->entries[1];
    Eigen::VectorXd expected = Eigen::VectorXd::Zero(table->total_dim());
    double y00 = 1.0 / std::sqrt(4.0 * std::numbers::pi);
    expected[e1.offset + 0] = -y00 / 3.0;
    // identify which column is the (m=0) harmonic: it is the one with a
    // nonzero projection of H' * e_0
    Eigen::VectorXd He0 = table->project(
        h.cwiseProduct(table->to_nodal(table->unit_coeff(0, 0))));
    int dominant;
    He0.cwiseAbs().maxCoeff(&dominant);
    expected.setZero();
    expected[dominant] = -He0[dominant] / 3.0;
    CHECK((t.coeff - expected).cwiseAbs().maxCoeff() < 1e-12);

    REQUIRE(el.removable.size() == 1);
    CHECK(el.removable[0].entry_j == 1);
    CHECK(el.removable[0].exponent == doctest::Approx(1.0));
}

TEST_CASE("n=1 tip label with constant H': only the S0 piece survives") {
    auto chart = chart_circle(1.0);
    auto table = chart.spectrum;
    Eigen::VectorXd h = Eigen::VectorXd::Constant(table->node_count(), 0.7);
    auto warp = WarpData::Make(*table, h, {});
    auto basis = full_space(chart, warp, 0, gamma_window_midpoint(chart), 2.0);
    REQUIRE(basis.elements.size() == 2);

    // constant generator: correction x R(H' e0) vanishes since H' e0 stays
    // in the kernel and R projects onto E_1
    CHECK(basis.elements[0].correction.empty());

    // log generator: x ln(x) R(H' e0) vanishes too; the S0 piece is
    // -x S0(H' e0) = -0.7 x e0 (kernel diagonal of S0 equals 1 on this cone)
    const auto& c1 = basis.elements[1].correction;
    REQUIRE(c1.terms().size() == 1);
    CHECK(c1.terms()[0].log_power == 0);
    CHECK(c1.terms()[0].exponent == doctest::Approx(1.0));
    Eigen::VectorXd expect = -0.7 * table->unit_coeff(0, 0);
    CHECK((c1.terms()[0].coeff - expect).cwiseAbs().maxCoeff() < 1e-12);

    // cross-check against the quadrature oracle
    auto u = mellin_for_hat(chart, 0, 0, true);
    auto g1 = contour_quadrature_oracle_g1(chart, warp, 0, u,
                                           default_contour_radius_g1(chart, 0), 128, 2.0);
    CHECK(max_coeff_diff(c1, g1) < 1e-8);
}

TEST_CASE("already-minimal case split and the gamma boundary guard") {
    auto chart = chart_circle(1.3);
    auto warp = circle_warp(*chart.spectrum);
    double gamma = gamma_window_midpoint(chart);  // I_lo = 0.5 (q_2^- - 2) - ...
    double W = default_truncation_weight(chart);

    // label q_1^-: q_1^- - 1 = -1.769 vs I_lo = -1.769... compute directly
    double I_lo = 0.5 * (chart.n + 1) - gamma - 2.0;
    auto b1 = full_space(chart, warp, 1, gamma, W);
    CHECK(b1.elements[0].correction_already_minimal ==
          (chart.root(1).q_minus - 1.0 < I_lo));
    auto b2 = full_space(chart, warp, 2, gamma, W);
    CHECK(b2.elements[0].correction_already_minimal ==
          (chart.root(2).q_minus - 1.0 < I_lo));

    // boundary hit: gamma with I_lo exactly at q_1^- - 1
    double gamma_bad = 0.5 * (chart.n + 1) - 2.0 - (chart.root(1).q_minus - 1.0);
    CHECK_THROWS_WITH_AS(full_space(chart, warp, 1, gamma_bad, W),
                         doctest::Contains("adjust gamma"), ConstraintError);
}

TEST_CASE("warp validation rejects operators with zero-order terms") {
    auto table = spectrum_analytic(CrossSection::CircleRadius(1.0), 3);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(table->total_dim(), table->total_dim());
    Eigen::VectorXd h = Eigen::VectorXd::Zero(table->node_count());
    CHECK_THROWS_WITH_AS(WarpData::Make(*table, h, bad),
                         doctest::Contains("annihilate"), ConstraintError);
}

TEST_CASE("hat profiles are discretely harmonic away from the cutoff") {
    // second-order decay of the model-cone residual under mesh refinement
    auto chart = chart_circle(1.3);
    Cutoff omega;
    auto residual = [&](int label, double dr) {
        double q = chart.root(label).q_minus;
        double lam = chart.spectrum->entries[label].lambda;
        int n_nodes = static_cast<int>(std::ceil((0.0 - std::log(1e-3)) / dr)) + 1;
        double worst = 0.0;
        for (int i = 2; i + 2 < n_nodes; ++i) {
            double r = std::log(1e-3) + i * dr;
            double x = std::exp(r);
            if (x > 0.35) continue;  // stay inside the omega == 1 zone
            auto f = [&](double rr) { return omega(std::exp(rr)) * std::exp(-q * rr); };
            double d2 = (f(r + dr) - 2.0 * f(r) + f(r - dr)) / (dr * dr);
            double lap = std::exp(-2.0 * r) * (d2 + lam * f(r));  // n = 1
            worst = std::max(worst, std::abs(lap));
        }
        return worst;
    };
    for (int label : {1, 2}) {
        double e1 = residual(label, 0.02);
        double e2 = residual(label, 0.01);
        CHECK(e1 / e2 > 3.0);
        CHECK(e1 / e2 < 5.0);
    }
}

TEST_CASE("basis JSON report") {
    auto chart = chart_circle(1.3);
    auto warp = circle_warp(*chart.spectrum);
    auto basis = full_space(chart, warp, 1, gamma_window_midpoint(chart),
                            default_truncation_weight(chart));
    auto j = basis.to_json();
    CHECK(j["label_j"] == 1);
    CHECK(j["elements"].size() == 2);
    CHECK(j["elements"][0].contains("hat_render"));
}
