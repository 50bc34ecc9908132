#include "conelab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace conelab {

namespace {
constexpr double kPi = std::numbers::pi;
}

int SpectrumTable::total_dim() const {
    int d = 0;
    for (const auto& e : entries) d += e.mult;
    return d;
}

Eigen::VectorXd SpectrumTable::to_nodal(const Eigen::VectorXd& coeff) const {
    if (!has_nodal()) throw ConstraintError("spectrum: no nodal representation");
    return basis * coeff;
}

Eigen::VectorXd SpectrumTable::project(const Eigen::VectorXd& nodal) const {
    if (!has_nodal()) throw ConstraintError("spectrum: no nodal representation");
    return basis.transpose() * weights.cwiseProduct(nodal).matrix();
}

int SpectrumTable::entry_of_column(int col) const {
    for (const auto& e : entries)
        if (col >= e.offset && col < e.offset + e.mult) return e.j;
    throw std::out_of_range("spectrum: column out of range");
}

Eigen::VectorXd SpectrumTable::unit_coeff(int j, int which) const {
    for (const auto& e : entries) {
        if (e.j == j) {
            if (which < 0 || which >= e.mult)
                throw std::out_of_range("spectrum: eigenvector index out of range");
            Eigen::VectorXd c = Eigen::VectorXd::Zero(total_dim());
            c[e.offset + which] = 1.0;
            return c;
        }
    }
    throw std::out_of_range("spectrum: no entry with index j");
}

Eigen::VectorXd SpectrumTable::eigenvalue_diagonal() const {
    Eigen::VectorXd d(total_dim());
    for (const auto& e : entries)
        for (int m = 0; m < e.mult; ++m) d[e.offset + m] = e.lambda;
    return d;
}

double SpectrumTable::dot(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    return (u.array() * v.array() * weights.array()).sum();
}

Eigen::VectorXd SpectrumTable::apply_laplacian(const Eigen::VectorXd& nodal) const {
    if (cs.kind == CrossSectionKind::sphere)
        throw ConstraintError("spectrum: nodal Laplacian only for 1-d cross-sections");
    const int comps = cs.components;
    const int M = node_count() / comps;
    Eigen::VectorXd out(node_count());
    if (cs.kind == CrossSectionKind::circle) {
        // exact trigonometric differentiation per component, O(M^2)
        const double rho = cs.circumference / (2.0 * kPi);
        for (int c = 0; c < comps; ++c) {
            const double* u = nodal.data() + c * M;
            std::vector<std::complex<double>> hat(M / 2 + 1, 0.0);
            for (int k = 0; k <= M / 2; ++k) {
                std::complex<double> acc = 0.0;
                for (int i = 0; i < M; ++i)
                    acc += u[i] * std::exp(std::complex<double>(0.0, -2.0 * kPi * k * i / M));
                hat[k] = acc / static_cast<double>(M);
            }
            for (int i = 0; i < M; ++i) {
                double acc = hat[0].real() * 0.0;
                for (int k = 1; k <= M / 2; ++k) {
                    double factor = (k == M / 2) ? 1.0 : 2.0;
                    std::complex<double> ph =
                        std::exp(std::complex<double>(0.0, 2.0 * kPi * k * i / M));
                    acc += factor * (-(double)k * k) * (hat[k] * ph).real();
                }
                out[c * M + i] = acc / (rho * rho);
            }
        }
        return out;
    }
    // sampled1d: assembled conservative stencil
    const double dtheta = 2.0 * kPi / M;
    for (int c = 0; c < comps; ++c) {
        for (int i = 0; i < M; ++i) {
            int ip = (i + 1) % M, im = (i + M - 1) % M;
            double bp = fd_flux[c * M + i];                 // half node i+1/2
            double bm = fd_flux[c * M + im];                // half node i-1/2
            double wi = 1.0 / std::sqrt(cs.metric_samples[i]);
            out[c * M + i] = wi *
                (bp * (nodal[c * M + ip] - nodal[c * M + i]) -
                 bm * (nodal[c * M + i] - nodal[c * M + im])) / (dtheta * dtheta);
        }
    }
    return out;
}

nlohmann::json SpectrumTable::to_json() const {
    nlohmann::json j;
    j["cross_section"] = cs.describe();
    j["n"] = n;
    j["entries"] = nlohmann::json::array();
    for (const auto& e : entries)
        j["entries"].push_back({{"j", e.j}, {"lambda", e.lambda}, {"mult", e.mult}});
    return j;
}

void SpectrumTable::check_invariants() const {
    if (entries.empty()) throw ConstraintError("spectrum: empty table");
    if (entries[0].lambda != 0.0) throw ConstraintError("spectrum: lambda_0 must be 0");
    if (entries[0].mult != cs.components)
        throw ConstraintError("spectrum: mult(lambda_0) must equal component count");
    for (size_t i = 1; i < entries.size(); ++i)
        if (!(entries[i].lambda < entries[i - 1].lambda))
            throw ConstraintError("spectrum: eigenvalues must strictly decrease");
    if (has_nodal()) {
        Eigen::MatrixXd gram =
            basis.transpose() * weights.asDiagonal() * basis -
            Eigen::MatrixXd::Identity(total_dim(), total_dim());
        if (gram.cwiseAbs().maxCoeff() > 1e-10)
            throw ConstraintError("spectrum: eigenbasis not orthonormal");
    }
}

std::vector<std::pair<double, int>> group_eigenvalues(const std::vector<double>& sorted,
                                                      double tol) {
    std::vector<std::pair<double, int>> groups;
    for (double v : sorted) {
        if (!groups.empty()) {
            double gap = groups.back().first - v;
            double scale = tol * (1.0 + std::abs(v));
            if (gap < scale) {
                groups.back().second += 1;
                continue;
            }
            if (gap < 2.0 * scale)
                throw ConstraintError("spectrum: unresolved multiplicity (gap in ambiguity band)");
        }
        groups.emplace_back(v, 1);
    }
    return groups;
}

namespace {

SpectrumPtr build_circle_table(const CrossSection& cs, int J_max) {
    auto table = std::make_shared<SpectrumTable>();
    table->cs = cs;
    table->n = 1;
    const double rho = cs.circumference / (2.0 * kPi);
    const int comps = cs.components;
    const int M = std::max(64, 8 * (J_max + 1));
    const double dtheta = 2.0 * kPi / M;
    const double wnode = rho * dtheta;  // arclength measure per node

    int total = 0;
    for (int j = 0; j <= J_max; ++j) {
        SpectrumEntry e;
        e.j = j;
        e.lambda = -(j / rho) * (j / rho);
        if (j == 0) e.lambda_exact = Rational(0);
        e.mult = (j == 0 ? 1 : 2) * comps;
        e.offset = total;
        total += e.mult;
        table->entries.push_back(e);
    }

    table->basis = Eigen::MatrixXd::Zero(comps * M, total);
    table->weights = Eigen::VectorXd::Constant(comps * M, wnode);
    table->node_theta.resize(comps * M);
    table->node_component.resize(comps * M);
    const double c0 = 1.0 / std::sqrt(cs.circumference);
    const double cj = 1.0 / std::sqrt(cs.circumference / 2.0);
    for (int c = 0; c < comps; ++c) {
        for (int i = 0; i < M; ++i) {
            table->node_theta[c * M + i] = i * dtheta;
            table->node_component[c * M + i] = c;
        }
        for (const auto& e : table->entries) {
            int j = e.j;
            if (j == 0) {
                for (int i = 0; i < M; ++i) table->basis(c * M + i, e.offset + c) = c0;
            } else {
                for (int i = 0; i < M; ++i) {
                    double th = i * dtheta;
                    table->basis(c * M + i, e.offset + 2 * c) = cj * std::cos(j * th);
                    table->basis(c * M + i, e.offset + 2 * c + 1) = cj * std::sin(j * th);
                }
            }
        }
    }
    table->check_invariants();
    return table;
}

SpectrumPtr build_sphere_table(const CrossSection& cs, int J_max) {
    auto table = std::make_shared<SpectrumTable>();
    table->cs = cs;
    table->n = cs.dimension;
    int total = 0;
    for (int j = 0; j <= J_max; ++j) {
        SpectrumEntry e;
        e.j = j;
        long long lam = -static_cast<long long>(j) * (j + cs.dimension - 1);
        e.lambda = static_cast<double>(lam);
        e.lambda_exact = Rational(lam);
        long long mult = sphere_harmonic_multiplicity(j, cs.dimension);
        e.mult = static_cast<int>(mult);
        e.offset = total;
        total += e.mult;
        table->entries.push_back(e);
    }
    if (cs.dimension == 2) {
        // Gauss-Legendre in cos(phi) x uniform azimuth; sized so that triple
        // products of basis functions are integrated exactly.
        const int Nphi = 3 * J_max + 4;
        const int Ntheta = 6 * J_max + 8;
        std::vector<double> gl_x, gl_w;
        gauss_legendre(Nphi, gl_x, gl_w);
        const double dth = 2.0 * kPi / Ntheta;
        const int nodes = Nphi * Ntheta;
        table->basis = Eigen::MatrixXd::Zero(nodes, total);
        table->weights.resize(nodes);
        table->node_theta.resize(nodes);
        table->node_phi.resize(nodes);
        for (int a = 0; a < Nphi; ++a) {
            double phi = std::acos(gl_x[a]);
            for (int b = 0; b < Ntheta; ++b) {
                int idx = a * Ntheta + b;
                table->node_phi[idx] = phi;
                table->node_theta[idx] = b * dth;
                table->weights[idx] = gl_w[a] * dth;
            }
        }
        for (const auto& e : table->entries) {
            int l = e.j;
            int col = e.offset;
            for (int m = 0; m <= l; ++m) {
                for (int kind = (m == 0 ? 0 : 1); kind <= (m == 0 ? 0 : 2); ++kind) {
                    for (int idx = 0; idx < nodes; ++idx)
                        table->basis(idx, col) = real_sph_harm(
                            l, m, kind, table->node_phi[idx], table->node_theta[idx]);
                    ++col;
                }
            }
        }
        table->check_invariants();
    } else {
        // n >= 3: eigenvalues and multiplicities only (no nodal grid needed
        // downstream; indicial data is exact there).
        for (size_t i = 1; i < table->entries.size(); ++i)
            if (!(table->entries[i].lambda < table->entries[i - 1].lambda))
                throw ConstraintError("spectrum: eigenvalues must strictly decrease");
    }
    return table;
}

}  // namespace

SpectrumPtr spectrum_analytic(const CrossSection& cs, int J_max) {
    cs.validate();
    if (J_max < 0) throw ConstraintError("spectrum: J_max must be >= 0");
    switch (cs.kind) {
        case CrossSectionKind::circle:
            return build_circle_table(cs, J_max);
        case CrossSectionKind::sphere:
            return build_sphere_table(cs, J_max);
        default:
            throw ConstraintError("spectrum: analytic backend unavailable");
    }
}

SpectrumPtr spectrum_numeric(const CrossSection& cs, int J_max, double tol) {
    cs.validate();
    if (cs.kind != CrossSectionKind::sampled1d)
        throw ConstraintError("spectrum: numeric backend needs a sampled1d cross-section");
    const int M = static_cast<int>(cs.metric_samples.size());
    if (M < 4 * J_max)
        throw ConstraintError("spectrum: grid too coarse, need >= 4*J_max nodes");
    if (cs.components != 1)
        throw ConstraintError("spectrum: numeric backend supports one component");

    const double dtheta = 2.0 * kPi / M;
    // Conservative second-order stencil, symmetric under the weighted inner
    // product with node weights sqrt(g) dtheta.
    Eigen::VectorXd w(M), flux(M);
    for (int i = 0; i < M; ++i) {
        w[i] = std::sqrt(cs.metric_samples[i]) * dtheta;
        int ip = (i + 1) % M;
        flux[i] = 0.5 * (1.0 / std::sqrt(cs.metric_samples[i]) +
                         1.0 / std::sqrt(cs.metric_samples[ip]));
    }
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M, M);
    for (int i = 0; i < M; ++i) {
        int ip = (i + 1) % M, im = (i + M - 1) % M;
        double wi = 1.0 / std::sqrt(cs.metric_samples[i]);
        A(i, ip) += wi * flux[i] / (dtheta * dtheta);
        A(i, im) += wi * flux[im] / (dtheta * dtheta);
        A(i, i) -= wi * (flux[i] + flux[im]) / (dtheta * dtheta);
    }
    // Symmetrize: S = W^{1/2} A W^{-1/2}
    Eigen::VectorXd ws = w.cwiseSqrt();
    Eigen::MatrixXd S = ws.asDiagonal() * A * ws.cwiseInverse().asDiagonal();
    S = 0.5 * (S + S.transpose());  // clean fp asymmetry
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    if (es.info() != Eigen::Success)
        throw SolverError("spectrum: eigensolve did not converge");

    // Sort descending (eigenvalues are <= 0).
    std::vector<int> order(M);
    for (int i = 0; i < M; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return es.eigenvalues()[a] > es.eigenvalues()[b]; });

    std::vector<double> sorted(M);
    for (int i = 0; i < M; ++i) sorted[i] = es.eigenvalues()[order[i]];

    // Snap lambda_0 and group distinct eigenvalues (stop once the requested
    // entries are complete; deeper clustering is irrelevant).
    if (std::abs(sorted[0]) < tol) sorted[0] = 0.0;
    std::vector<std::pair<double, int>> groups;
    for (double v : sorted) {
        if (!groups.empty()) {
            double gap = groups.back().first - v;
            double scale = tol * (1.0 + std::abs(v));
            if (gap < scale) {
                groups.back().second += 1;
                continue;
            }
            if (gap < 2.0 * scale)
                throw ConstraintError("spectrum: unresolved multiplicity (gap in ambiguity band)");
            if (static_cast<int>(groups.size()) == J_max + 1) break;
        }
        groups.emplace_back(v, 1);
    }
    if (static_cast<int>(groups.size()) < J_max + 1)
        throw ConstraintError("spectrum: fewer distinct eigenvalues than requested");

    auto table = std::make_shared<SpectrumTable>();
    table->cs = cs;
    table->n = 1;
    int needed = 0;
    for (int j = 0; j <= J_max; ++j) {
        SpectrumEntry e;
        e.j = j;
        e.lambda = (j == 0) ? 0.0 : groups[j].first;
        if (j == 0) e.lambda_exact = Rational(0);
        e.mult = groups[j].second;
        e.offset = needed;
        needed += e.mult;
        table->entries.push_back(e);
    }
    table->basis.resize(M, needed);
    table->weights = w;
    for (int c = 0; c < needed; ++c) {
        Eigen::VectorXd u = es.eigenvectors().col(order[c]).cwiseQuotient(ws);
        double norm = std::sqrt((u.array().square() * w.array()).sum());
        table->basis.col(c) = u / norm;
    }
    table->node_theta.resize(M);
    table->node_component.assign(M, 0);
    for (int i = 0; i < M; ++i) table->node_theta[i] = i * dtheta;
    table->fd_flux.assign(flux.data(), flux.data() + M);
    table->check_invariants();
    return table;
}

}  // namespace conelab
