#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "conelab/norms.hpp"

using namespace conelab;

namespace {
constexpr double kPi = std::numbers::pi;

// adaptive Simpson on [a, b], reference for the 1-d x-integrals
double simpson(const std::function<double(double)>& f, double a, double b, int levels = 18) {
    int n = 2;
    double prev = 0.0;
    for (int l = 0; l < levels; ++l) {
        n *= 2;
        double h = (b - a) / n;
        double acc = f(a) + f(b);
        for (int i = 1; i < n; ++i) acc += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
        double cur = acc * h / 3.0;
        if (l > 3 && std::abs(cur - prev) < 1e-13 * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

IndicialChart chart13() {
    return indicial_roots(spectrum_analytic(CrossSection::CircleRadius(1.3), 4), 1);
}
}  // namespace

TEST_CASE("mellin_norm matches the closed-form integral for omega x^1") {
    // n=1, gamma=1, p=2, s=0: weight x^{(n+1)/2-gamma} = 1, so
    // value^2 = circumference * int (omega x)^2 dx/x
    Cutoff omega;
    auto g = sample_collar(1e-4, 0.001, 8, 2.0 * kPi, 1.3, [](double x, double) {
        return x;
    });
    auto res = mellin_norm(g, 0, 1.0, 2.0, 1);
    CHECK(res.diagnosis.verdict == Verdict::convergent);
    double ref = 2.0 * kPi * 1.3 *
                 simpson([&](double x) { return x * omega(x) * omega(x); }, 1e-12, 0.95);
    CHECK(std::abs(res.value - std::sqrt(ref)) < 1e-6);
}

TEST_CASE("mellin_norm converges at second order in the r grid") {
    // x^{0.3} leaves a nonzero boundary derivative at the inner cutoff, so
    // the trapezoid error shows its clean second-order term
    Cutoff omega;
    auto squared = [&](double dr) {
        auto g = sample_collar(1e-2, dr, 8, 2.0 * kPi, 1.0,
                               [](double x, double) { return std::pow(x, 0.3); });
        double v = mellin_norm(g, 0, 1.0, 2.0, 1).value;
        double ref = 2.0 * kPi * simpson([&](double x) {
            return std::pow(x, 0.6) * omega(x) * omega(x) / x;
        }, g.x_min(), 0.95);
        return std::abs(v * v - ref);
    };
    double e1 = squared(0.02);
    double e2 = squared(0.01);
    CHECK(e1 / e2 > 3.0);
    CHECK(e1 / e2 < 5.0);
}

TEST_CASE("mellin_norm flags the logarithmic divergence of omega * 1") {
    auto g = sample_collar(0.7e-6, 0.01, 8, 2.0 * kPi, 1.0,
                           [](double, double) { return 1.0; });
    auto res = mellin_norm(g, 0, 1.0, 2.0, 1);
    CHECK(res.diagnosis.verdict == Verdict::divergent);
    CHECK(res.diagnosis.rate_kind == "log");
    // consistent with the analytic criterion
    CHECK(!membership_exponent_test(0.0, 1.0, 1));
}

TEST_CASE("mellin_norm of zero is zero and convergent") {
    auto g = sample_collar(1e-4, 0.01, 8, 2.0 * kPi, 1.0,
                           [](double, double) { return 0.0; });
    auto res = mellin_norm(g, 0, 1.0, 2.0, 1);
    CHECK(res.value == 0.0);
    CHECK(res.diagnosis.verdict == Verdict::convergent);
}

TEST_CASE("power divergence reports a rate") {
    // u = x^{-1/2} at weight 0: integrand x^{-p/2 - 1}: clean power growth
    auto g = sample_collar(0.7e-6, 0.01, 8, 2.0 * kPi, 1.0,
                           [](double x, double) { return std::pow(x, -0.5); });
    auto res = mellin_norm(g, 0, 1.0, 2.0, 1);
    CHECK(res.diagnosis.verdict == Verdict::divergent);
    CHECK(res.diagnosis.rate_kind == "power");
    CHECK(res.diagnosis.rate == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("norm scales linearly in the amplitude") {
    auto g = sample_collar(1e-4, 0.005, 16, 2.0 * kPi, 1.0, [](double x, double y) {
        return x * (1.0 + 0.5 * std::cos(y));
    });
    auto res1 = mellin_norm(g, 1, 1.0, 2.0, 1);
    GriddedFunction g7 = g;
    g7.values *= -7.0;
    auto res7 = mellin_norm(g7, 1, 1.0, 2.0, 1);
    CHECK(std::abs(res7.value - 7.0 * res1.value) < 1e-10 * res7.value);
}

TEST_CASE("derivatives enter the norm: s = 1 sees the y oscillation") {
    auto flat = sample_collar(1e-3, 0.01, 16, 2.0 * kPi, 1.0,
                              [](double x, double) { return x; });
    auto wavy = sample_collar(1e-3, 0.01, 16, 2.0 * kPi, 1.0, [](double x, double y) {
        return x * (1.0 + 0.01 * std::cos(4.0 * y));
    });
    double n0 = mellin_norm(flat, 1, 1.0, 2.0, 1).value;
    double n1 = mellin_norm(wavy, 1, 1.0, 2.0, 1).value;
    CHECK(n1 > n0);
}

TEST_CASE("insufficient grid is rejected") {
    auto g = sample_collar(1e-2, 0.5, 4, 2.0 * kPi, 1.0,
                           [](double, double) { return 1.0; });
    CHECK_THROWS_WITH_AS(mellin_norm(g, 4, 1.0, 2.0, 1),
                         doctest::Contains("insufficient grid"), ConstraintError);
}

TEST_CASE("membership_suite agrees with the analytic criterion off-boundary") {
    auto chart = chart13();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<std::pair<double, int>> terms;
    double sigma = 1.4;
    // margins of at least 0.15 on either side of the threshold e = sigma - 1
    for (int i = 0; i < 10; ++i) {
        double margin = 0.15 + 1.2 * uni(rng);
        bool inside = (i % 2 == 0);
        double e = (sigma - 1.0) + (inside ? margin : -margin);
        if (e < 0.0) e = (sigma - 1.0) + margin;
        terms.push_back({e, 0});
    }
    auto rows = membership_suite(chart, terms, sigma, 2.0, 1);
    for (const auto& row : rows) {
        CHECK(row.agree);
        CHECK(row.analytic != "indeterminate");
    }
}

TEST_CASE("membership_suite: boundary case is indeterminate, logs keep verdicts") {
    auto chart = chart13();
    double sigma = 1.4;
    std::vector<std::pair<double, int>> terms = {
        {sigma - 1.0, 0},        // exactly on the threshold
        {sigma - 1.0 + 0.4, 1},  // strictly convergent with a log factor
        {sigma - 1.0 - 0.4, 1},  // strictly divergent with a log factor
    };
    auto rows = membership_suite(chart, terms, sigma, 2.0, 1);
    CHECK(rows[0].analytic == "indeterminate");
    CHECK(rows[0].quadrature == "indeterminate");
    CHECK(rows[1].quadrature == "convergent");
    CHECK(rows[1].agree);
    CHECK(rows[2].quadrature == "divergent");
    CHECK(rows[2].agree);
}

TEST_CASE("weight shift moves the convergence threshold by exactly delta") {
    auto chart = chart13();
    double sigma = 1.4;
    double delta = 0.3;
    std::vector<std::pair<double, int>> base, shifted;
    for (double off : {-0.5, -0.2, 0.2, 0.5}) {
        base.push_back({sigma - 1.0 + off, 0});
        shifted.push_back({sigma - 1.0 + off + delta, 0});
    }
    auto rows_sigma = membership_suite(chart, base, sigma, 2.0, 1);
    // shifting u by x^delta is the same as lowering sigma by delta
    auto rows_shifted = membership_suite(chart, shifted, sigma + delta, 2.0, 1);
    for (size_t i = 0; i < rows_sigma.size(); ++i)
        CHECK(rows_sigma[i].quadrature == rows_shifted[i].quadrature);
}

TEST_CASE("membership CSV has the expected header and row count") {
    auto chart = chart13();
    auto rows = membership_suite(chart, {{0.5, 0}, {0.1, 0}}, 1.4, 2.0, 1);
    auto csv = membership_csv(rows);
    CHECK(csv.find("exponent,log_power,sigma,analytic,quadrature,agree,value_or_rate") !=
          std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    auto empty_csv = membership_csv({});
    CHECK(std::count(empty_csv.begin(), empty_csv.end(), '\n') == 1);
}

TEST_CASE("submultiplicativity smoke: finite bounded ratios") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> uni(0.3, 1.5);
    std::vector<GriddedFunction> us, vs;
    for (int i = 0; i < 8; ++i) {
        double a = 0.8 + uni(rng), b = 0.8 + uni(rng);
        double cu = uni(rng), cv = uni(rng);
        us.push_back(sample_collar(1e-4, 0.01, 16, 2.0 * kPi, 1.0,
                                   [=](double x, double y) {
                                       return std::pow(x, a) * (1.0 + cu * std::cos(y));
                                   }));
        vs.push_back(sample_collar(1e-4, 0.01, 16, 2.0 * kPi, 1.0,
                                   [=](double x, double y) {
                                       return std::pow(x, b) * (1.0 + cv * std::sin(y));
                                   }));
    }
    auto rep = submultiplicativity_smoke(us, vs, 0, 1.0, 2.0, 1);
    CHECK(rep.ratios.size() == 8);
    for (double r : rep.ratios) CHECK(std::isfinite(r));
    CHECK(rep.max_ratio < 100.0);
    CHECK(rep.max_ratio > 0.0);
}

TEST_CASE("submultiplicativity rejects divergent factors") {
    std::vector<GriddedFunction> us = {sample_collar(0.7e-6, 0.01, 8, 2.0 * kPi, 1.0,
                                                     [](double, double) { return 1.0; })};
    std::vector<GriddedFunction> vs = {sample_collar(0.7e-6, 0.01, 8, 2.0 * kPi, 1.0,
                                                     [](double x, double) { return x; })};
    CHECK_THROWS_WITH_AS(submultiplicativity_smoke(us, vs, 0, 1.0, 2.0, 1),
                         doctest::Contains("convergent"), ConstraintError);
}
