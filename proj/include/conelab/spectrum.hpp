#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <vector>

#include "conelab/cross_section.hpp"
#include "conelab/rational.hpp"
#include "json.hpp"

namespace conelab {

/// One distinct eigenvalue of the cross-section Laplacian with its eigenspace.
struct SpectrumEntry {
    int j = 0;
    double lambda = 0.0;
    std::optional<Rational> lambda_exact;  // set when the value is exactly rational
    int mult = 1;
    int offset = 0;  // first column of this eigenspace in SpectrumTable::basis
};

/// Eigenvalue/eigenspace data of the cross-section Laplacian. Eigenvalues are
/// distinct and strictly decreasing from lambda_0 = 0; multiplicities count
/// the eigenspace dimensions separately. For cross-sections with a nodal
/// quadrature grid the orthonormal eigenbasis is stored as nodal values, and
/// cross-section functions are handled as coefficient vectors in that basis.
///
/// Immutable after construction; all operations on it are pure.
class SpectrumTable {
public:
    CrossSection cs;
    int n = 1;  // cross-section dimension
    std::vector<SpectrumEntry> entries;

    // Nodal representation (absent for spheres of dimension >= 3).
    Eigen::MatrixXd basis;    // nodes x total_dim, orthonormal under `weights`
    Eigen::VectorXd weights;  // quadrature weights of the discrete inner product
    std::vector<double> node_theta;  // 1-d angle, or azimuth for S^2
    std::vector<double> node_phi;    // colatitude for S^2 (empty otherwise)
    std::vector<int> node_component; // component index per node (1-d kinds)

    int total_dim() const;
    bool has_nodal() const { return basis.size() > 0; }
    int node_count() const { return static_cast<int>(basis.rows()); }

    /// Eigenbasis coefficients -> nodal values.
    Eigen::VectorXd to_nodal(const Eigen::VectorXd& coeff) const;
    /// Quadrature projection of nodal values onto the eigenbasis span.
    Eigen::VectorXd project(const Eigen::VectorXd& nodal) const;

    /// Entry index owning a given basis column.
    int entry_of_column(int col) const;
    /// Unit coefficient vector selecting basis vector `which` of entry j.
    Eigen::VectorXd unit_coeff(int j, int which = 0) const;
    /// Per-column eigenvalue, as a diagonal vector of size total_dim.
    Eigen::VectorXd eigenvalue_diagonal() const;

    /// Discrete inner product <u, v> of nodal vectors.
    double dot(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;

    /// Applies the discrete cross-section Laplacian to nodal values
    /// (1-d cross-sections only; spectral for the circle, the assembled
    /// stencil for sampled metrics).
    Eigen::VectorXd apply_laplacian(const Eigen::VectorXd& nodal) const;

    nlohmann::json to_json() const;

    void check_invariants() const;

    // sampled1d internals kept for apply_laplacian
    std::vector<double> fd_flux;  // 1/sqrt(g) at half nodes, size M per component
};

using SpectrumPtr = std::shared_ptr<const SpectrumTable>;

/// Closed-form spectrum for circles and round spheres. Exact up to the
/// representation of the circumference.
SpectrumPtr spectrum_analytic(const CrossSection& cs, int J_max);

/// Dense symmetric eigendecomposition of the discretized 1-d Laplace-Beltrami
/// operator for sampled periodic metrics. Eigenvalues are grouped into
/// distinct entries, lambda_0 is snapped to exactly 0 when within tol.
SpectrumPtr spectrum_numeric(const CrossSection& cs, int J_max, double tol);

/// Distinct-eigenvalue grouping (exposed for testing). Values must be sorted
/// descending. Throws "unresolved multiplicity" when a gap falls inside the
/// ambiguity band [tol, 2 tol].
std::vector<std::pair<double, int>> group_eigenvalues(const std::vector<double>& sorted,
                                                      double tol);

}  // namespace conelab
