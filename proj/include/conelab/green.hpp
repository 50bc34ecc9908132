#pragma once

#include "conelab/asymp.hpp"
#include "conelab/indicial.hpp"

namespace conelab {

/// First-order warping data of the cone metric at the tip: H' is the
/// x-derivative of the volume distortion restricted to x = 0, DeltaPrime the
/// x-derivative of the cross-section Laplacian (a second-order operator
/// without zero-order term, given as an eigenbasis matrix).
struct WarpData {
    bool straight = true;
    Eigen::VectorXd hprime_nodal;  // H'(y) on the table's quadrature nodes
    Eigen::MatrixXd delta_prime;   // eigenbasis matrix, annihilates the kernel

    static WarpData Straight() { return WarpData{}; }
    static WarpData Make(const SpectrumTable& table, Eigen::VectorXd hprime_nodal,
                         Eigen::MatrixXd delta_prime);
};

/// One basis element of an asymptotic space: the model-cone profile, its
/// first-order warped correction, and bookkeeping for which correction
/// pieces are redundant within the domain composition.
struct BasisElement {
    AsympExpansion hat;
    AsympExpansion correction;  // empty for straight cones
    // correction lies inside the minimal space already (label-1 below I_gamma)
    bool correction_already_minimal = false;

    struct RemovablePiece {
        double exponent = 0.0;
        int entry_j = 0;            // the correction piece sits inside E_{q_j^-}
        Eigen::VectorXd coeff;
    };
    std::vector<RemovablePiece> removable;

    AsympExpansion full() const;
};

/// Basis of the asymptotic space attached to one pole label, with the
/// hat <-> full pairing realized by element index.
struct AsympSpaceBasis {
    int label_j = 0;       // label q_j^- (j = 0 is the tip-value label)
    double label = 0.0;    // the root value
    std::vector<BasisElement> elements;

    std::vector<AsympExpansion> hat_basis() const;
    std::vector<AsympExpansion> full_basis() const;
    nlohmann::json to_json() const;
};

/// Model-cone asymptotic space for the label q_j^- (j >= 1) or the tip label
/// (j = 0): for n = 1 the tip label is the double pole and the basis carries
/// the two-parameter (constant, log) family.
std::vector<AsympExpansion> hat_space(const IndicialChart& chart, int label_j, double W);

/// Warp-corrected space with the Theta pairing to the model-cone basis.
/// gamma fixes the weight interval used for the already-minimal case split.
AsympSpaceBasis full_space(const IndicialChart& chart, const WarpData& warp, int label_j,
                           double gamma, double W);

/// Mellin data polynomial: Mu(z) = sum_k z^k coeffs[k] in eigenbasis
/// coordinates.
using MellinPoly = std::vector<Eigen::VectorXd>;

/// Numerical realization of the residue operator by trapezoid quadrature on
/// the circle |z - sigma| = eps, evaluated on an x-ladder and fitted to the
/// local term basis at sigma. Exponentially convergent in N; serves as the
/// oracle for the closed-form bases.
AsympExpansion contour_quadrature_oracle(const IndicialChart& chart, int sigma_j,
                                         const MellinPoly& u, double eps, int N,
                                         double W);

/// Same quadrature for the first-order correction operator.
AsympExpansion contour_quadrature_oracle_g1(const IndicialChart& chart,
                                            const WarpData& warp, int sigma_j,
                                            const MellinPoly& u, double eps, int N,
                                            double W);

/// Half the minimal pole gap: the concrete "sufficiently small" radius.
double default_contour_radius(const IndicialChart& chart);

/// Safe radius for the correction-operator contour around label sigma_j,
/// additionally avoiding the +1-shifted pole lattice the correction symbol
/// is singular on.
double default_contour_radius_g1(const IndicialChart& chart, int sigma_j);

}  // namespace conelab
