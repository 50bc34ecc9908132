#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "conelab/errors.hpp"

namespace conelab {

enum class CrossSectionKind { circle, sphere, sampled1d };

/// Description of the cone cross-section (the boundary manifold). The cone
/// near the tip is [0,1) x cross-section with metric dx^2 + x^2 h.
struct CrossSection {
    CrossSectionKind kind = CrossSectionKind::circle;
    double circumference = 0.0;          // circle: total length 2*pi*rho
    int dimension = 1;                   // n, so dim(cone) = n + 1
    std::vector<double> metric_samples;  // sampled1d: h(theta) > 0 on uniform grid
    int components = 1;                  // connected components (>= 1)

    static CrossSection Circle(double circumference, int components = 1);
    static CrossSection CircleRadius(double rho, int components = 1);
    static CrossSection Sphere(int n);
    static CrossSection Sampled(std::vector<double> metric, int components = 1);

    void validate() const;
    std::string describe() const;
};

/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Associated Legendre P_l^m(x) without Condon-Shortley phase, plus its first
/// and second derivatives with respect to phi (x = cos phi), evaluated via
/// the standard recurrences. Used for sphere eigenbases and their residual
/// checks.
double assoc_legendre_p(int l, int m, double x);
double assoc_legendre_dphi(int l, int m, double phi);
double assoc_legendre_d2phi(int l, int m, double phi);

/// Real orthonormal spherical harmonic on S^2.
/// kind: 0 -> m=0; 1 -> cos(m theta) branch; 2 -> sin(m theta) branch.
double real_sph_harm(int l, int m, int kind, double phi, double theta);

/// Dimension of the space of degree-j spherical harmonics on S^n.
long long sphere_harmonic_multiplicity(int j, int n);

}  // namespace conelab
