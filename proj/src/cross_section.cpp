#include "conelab/cross_section.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace conelab {

CrossSection CrossSection::Circle(double circumference, int components) {
    CrossSection cs;
    cs.kind = CrossSectionKind::circle;
    cs.circumference = circumference;
    cs.dimension = 1;
    cs.components = components;
    cs.validate();
    return cs;
}

CrossSection CrossSection::CircleRadius(double rho, int components) {
    return Circle(2.0 * std::numbers::pi * rho, components);
}

CrossSection CrossSection::Sphere(int n) {
    CrossSection cs;
    cs.kind = CrossSectionKind::sphere;
    cs.dimension = n;
    cs.components = 1;
    cs.validate();
    return cs;
}

CrossSection CrossSection::Sampled(std::vector<double> metric, int components) {
    CrossSection cs;
    cs.kind = CrossSectionKind::sampled1d;
    cs.dimension = 1;
    cs.metric_samples = std::move(metric);
    cs.components = components;
    cs.validate();
    return cs;
}

void CrossSection::validate() const {
    if (components < 1) throw ConstraintError("cross-section: components must be >= 1");
    switch (kind) {
        case CrossSectionKind::circle:
            if (!(circumference > 0.0))
                throw ConstraintError("cross-section: circumference must be positive");
            break;
        case CrossSectionKind::sphere:
            if (dimension < 2)
                throw ConstraintError("cross-section: sphere dimension must be >= 2");
            if (components != 1)
                throw ConstraintError("cross-section: sphere has one component");
            break;
        case CrossSectionKind::sampled1d:
            if (metric_samples.size() < 8)
                throw ConstraintError("cross-section: sampled metric needs >= 8 nodes");
            for (double g : metric_samples)
                if (!(g > 0.0))
                    throw ConstraintError(
                        "cross-section: sampled metric must be strictly positive");
            break;
    }
}

std::string CrossSection::describe() const {
    std::ostringstream os;
    switch (kind) {
        case CrossSectionKind::circle:
            os << "circle(circumference=" << circumference << ")";
            break;
        case CrossSectionKind::sphere:
            os << "S^" << dimension;
            break;
        case CrossSectionKind::sampled1d:
            os << "sampled1d(" << metric_samples.size() << " nodes)";
            break;
    }
    if (components > 1) os << " x" << components;
    return os.str();
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const double pi = std::numbers::pi;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Legendre P_n(x) and derivative by recurrence
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

double assoc_legendre_p(int l, int m, double x) {
    if (m < 0 || l < 0) throw std::invalid_argument("assoc_legendre_p: need l, m >= 0");
    if (m > l) return 0.0;
    // P_m^m = (2m-1)!! (1-x^2)^{m/2}, then upward recurrence in l.
    double pmm = 1.0;
    if (m > 0) {
        double somx2 = std::sqrt((1.0 - x) * (1.0 + x));
        double fact = 1.0;
        for (int i = 1; i <= m; ++i) {
            pmm *= fact * somx2;
            fact += 2.0;
        }
    }
    if (l == m) return pmm;
    double pmmp1 = x * (2.0 * m + 1.0) * pmm;
    if (l == m + 1) return pmmp1;
    double pll = 0.0;
    for (int ll = m + 2; ll <= l; ++ll) {
        pll = ((2.0 * ll - 1.0) * x * pmmp1 - (ll + m - 1.0) * pmm) / (ll - m);
        pmm = pmmp1;
        pmmp1 = pll;
    }
    return pll;
}

double assoc_legendre_dphi(int l, int m, double phi) {
    // (1-x^2) dP/dx = (l+m) P_{l-1}^m - l x P_l^m,  x = cos(phi)
    double x = std::cos(phi);
    double s = std::sin(phi);
    double pl = assoc_legendre_p(l, m, x);
    double plm1 = (l - 1 >= m) ? assoc_legendre_p(l - 1, m, x) : 0.0;
    return (l * x * pl - (l + m) * plm1) / s;
}

double assoc_legendre_d2phi(int l, int m, double phi) {
    double x = std::cos(phi);
    double s = std::sin(phi);
    double pl = assoc_legendre_p(l, m, x);
    double plm1 = (l - 1 >= m) ? assoc_legendre_p(l - 1, m, x) : 0.0;
    double dpl = assoc_legendre_dphi(l, m, phi);
    double dplm1 = (l - 1 >= m) ? assoc_legendre_dphi(l - 1, m, phi) : 0.0;
    // differentiate  (l cos(phi) P_l - (l+m) P_{l-1}) / sin(phi)
    double num = l * x * pl - (l + m) * plm1;
    double dnum = -l * s * pl + l * x * dpl - (l + m) * dplm1;
    return dnum / s - num * x / (s * s);
}

double real_sph_harm(int l, int m, int kind, double phi, double theta) {
    const double pi = std::numbers::pi;
    double x = std::cos(phi);
    if (kind == 0) {
        double norm = std::sqrt((2.0 * l + 1.0) / (4.0 * pi));
        return norm * assoc_legendre_p(l, 0, x);
    }
    double lnfact = 0.0;  // log((l-m)!/(l+m)!)
    for (int k = l - m + 1; k <= l + m; ++k) lnfact -= std::log(static_cast<double>(k));
    double norm = std::sqrt((2.0 * l + 1.0) / (2.0 * pi) * std::exp(lnfact));
    double p = assoc_legendre_p(l, m, x);
    return norm * p * (kind == 1 ? std::cos(m * theta) : std::sin(m * theta));
}

long long sphere_harmonic_multiplicity(int j, int n) {
    if (j == 0) return 1;
    auto binom = [](long long a, long long b) {
        if (b < 0 || b > a) return 0LL;
        long long r = 1;
        for (long long i = 1; i <= b; ++i) r = r * (a - b + i) / i;
        return r;
    };
    return binom(n + j, j) - binom(n + j - 2, j - 2);
}

}  // namespace conelab
