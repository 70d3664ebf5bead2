#include "driftwave/evo_assembly.hpp"

#include "driftwave/sparse_norms.hpp"

#include <algorithm>
#include <cmath>

namespace driftwave::evo {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void append_block(Triplets& trips, const SparseMatrix& block, int row0, int col0,
                  double scale = 1.0) {
    for (int c = 0; c < block.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(block, c); it; ++it)
            trips.emplace_back(row0 + static_cast<int>(it.row()), col0 + c, scale * it.value());
}

SparseMatrix scale_rows(const SparseMatrix& a, const Eigen::VectorXd& d) {
    SparseMatrix out = a;
    for (int c = 0; c < out.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(out, c); it; ++it) it.valueRef() *= d(it.row());
    return out;
}

SparseMatrix scale_cols(const SparseMatrix& a, const Eigen::VectorXd& d) {
    SparseMatrix out = a;
    for (int c = 0; c < out.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(out, c); it; ++it) it.valueRef() *= d(c);
    return out;
}

// Adjoint under the diagonal inner product w: w^{-1} A^T w.
SparseMatrix mass_adjoint(const SparseMatrix& a, const Eigen::VectorXd& w) {
    SparseMatrix at = a.transpose();
    for (int c = 0; c < at.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(at, c); it; ++it)
            it.valueRef() *= w(c) / w(it.row());
    return at;
}

}  // namespace

Eigen::VectorXd cell_average(const CylinderGrid& grid, int degree,
                             const Eigen::VectorXd& vertex_values) {
    Eigen::VectorXd out(grid.cells(degree));
    for (int t = 0; t < CylinderGrid::type_count(degree); ++t) {
        const int dirs = CylinderGrid::type_dirs(degree, t);
        const int spanned[3] = {dirs & 1, (dirs >> 1) & 1, (dirs >> 2) & 1};
        for (int ck = 0; ck < grid.extent(degree, t, 2); ++ck)
            for (int cj = 0; cj < grid.extent(degree, t, 1); ++cj)
                for (int ci = 0; ci < grid.extent(degree, t, 0); ++ci) {
                    double sum = 0.0;
                    int count = 0;
                    for (int cz = 0; cz <= spanned[2]; ++cz)
                        for (int cy = 0; cy <= spanned[1]; ++cy)
                            for (int cx = 0; cx <= spanned[0]; ++cx) {
                                int v[3] = {ci + cx, cj + cy, ck + cz};
                                for (int a = 0; a < 3; ++a)
                                    if (grid.periodic(a) && v[a] == grid.n(a)) v[a] = 0;
                                sum += vertex_values(grid.cell_index(0, 0, v[0], v[1], v[2]));
                                ++count;
                            }
                    out(grid.cell_index(degree, t, ci, cj, ck)) = sum / count;
                }
    }
    return out;
}

DriftSpec DriftSpec::make(const CylinderGrid& grid,
                          const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& field,
                          const std::function<double(const Eigen::Vector3d&)>& alpha) {
    DriftSpec spec;
    spec.x0 = VectorFieldSample::sample(grid, field);
    spec.alpha_vertex.resize(grid.cells(0));
    for (int k = 0; k < grid.extent(0, 0, 2); ++k)
        for (int j = 0; j < grid.extent(0, 0, 1); ++j)
            for (int i = 0; i < grid.extent(0, 0, 0); ++i)
                spec.alpha_vertex(grid.cell_index(0, 0, i, j, k)) =
                    alpha(grid.vertex_position(i, j, k));
    spec.max_speed = spec.x0.max_magnitude();
    spec.commutation_defect = 0.0;  // diagonal material blocks commute exactly
    return spec;
}

SparseMatrix assemble_exterior_block(const CylinderGrid& grid, int degree) {
    if (degree < 0 || degree > 2)
        throw std::invalid_argument("assemble_exterior_block: degree must be in 0..2");
    const int nu = grid.cells(degree);
    const int nw = grid.cells(degree + 1);

    // constrained derivative: boundary k-cells are fixed to zero
    const SparseMatrix d_constrained =
        scale_cols(grid.incidence(degree), grid.interior_indicator(degree));

    // -d* = -M_k^{-1} (d chi)^T M_{k+1}
    SparseMatrix minus_codif = d_constrained.transpose();
    const Eigen::VectorXd& mk = grid.mass(degree);
    const Eigen::VectorXd& mk1 = grid.mass(degree + 1);
    for (int c = 0; c < minus_codif.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(minus_codif, c); it; ++it)
            it.valueRef() *= -mk1(c) / mk(it.row());

    Triplets trips;
    append_block(trips, minus_codif, 0, nu);
    append_block(trips, d_constrained, nu, 0);
    SparseMatrix block(nu + nw, nu + nw);
    block.setFromTriplets(trips.begin(), trips.end());
    block.makeCompressed();
    return block;
}

DriftDecomposition assemble_drift_decomposition(const CylinderGrid& grid, int degree,
                                                const DriftSpec& drift,
                                                const Eigen::VectorXd& m0_diag) {
    if (drift.commutation_defect > 1e-12)
        throw std::invalid_argument(
            "assemble_drift_decomposition: multiplier does not commute with M0");
    const int nu = grid.cells(degree);
    const int nw = grid.cells(degree + 1);
    if (m0_diag.size() != nu + nw)
        throw std::invalid_argument("assemble_drift_decomposition: M0 diagonal size mismatch");

    const SparseMatrix lie_u = dec::lie_derivative_matrix(drift.x0, degree);
    const SparseMatrix lie_w = dec::lie_derivative_matrix(drift.x0, degree + 1);
    const SparseMatrix lie_w_adj = mass_adjoint(lie_w, grid.mass(degree + 1));

    DriftDecomposition out;
    {
        Triplets trips;
        append_block(trips, lie_u, 0, 0);
        append_block(trips, lie_w_adj, nu, nu, -1.0);
        out.l_block.resize(nu + nw, nu + nw);
        out.l_block.setFromTriplets(trips.begin(), trips.end());
    }

    const Eigen::VectorXd alpha_u = cell_average(grid, degree, drift.alpha_vertex);
    const Eigen::VectorXd alpha_w = cell_average(grid, degree + 1, drift.alpha_vertex);
    Eigen::VectorXd alpha(nu + nw);
    alpha << alpha_u, alpha_w;

    Eigen::VectorXd mass(nu + nw);
    mass << grid.mass(degree), grid.mass(degree + 1);

    const SparseMatrix a_op = scale_rows(out.l_block, alpha.cwiseProduct(m0_diag));
    const SparseMatrix a_adj = mass_adjoint(a_op, mass);
    out.c_sym = 0.5 * (a_op + a_adj);
    out.d_skew = 0.5 * (a_op - a_adj);

    // alpha (nabla - l_block) M0 + alpha (l_block M0 - M0 l_block)
    const SparseMatrix nabla_u = dec::covariant_derivative_matrix(drift.x0, degree);
    const SparseMatrix nabla_w = dec::covariant_derivative_matrix(drift.x0, degree + 1);
    SparseMatrix nabla_block(nu + nw, nu + nw);
    {
        Triplets trips;
        append_block(trips, nabla_u, 0, 0);
        append_block(trips, nabla_w, nu, nu);
        nabla_block.setFromTriplets(trips.begin(), trips.end());
    }
    const SparseMatrix mismatch =
        scale_cols(SparseMatrix(nabla_block - out.l_block), m0_diag);
    const SparseMatrix commut = SparseMatrix(scale_cols(out.l_block, m0_diag) -
                                             scale_rows(out.l_block, m0_diag));
    out.remainder = scale_rows(SparseMatrix(mismatch + commut), alpha);

    out.c_sym.makeCompressed();
    out.d_skew.makeCompressed();
    out.remainder.makeCompressed();
    return out;
}

M1TildeResult assemble_m1_tilde(const SparseMatrix& m1, const DriftDecomposition& drift,
                                const Eigen::VectorXd& mass, double c0) {
    M1TildeResult out;
    SparseMatrix sum = drift.remainder + drift.c_sym;
    if (m1.nonZeros() > 0) sum = SparseMatrix(sum + m1);
    sum.prune([](int, int, double v) { return std::abs(v) > 0.0; });
    sum.makeCompressed();
    out.m1_tilde = std::move(sum);
    out.norm = sparse_weighted_norm(out.m1_tilde, mass);
    out.sym_norm = sparse_weighted_sym_norm(out.m1_tilde, mass);
    out.rho0 = (out.norm + 1.0) / c0;
    return out;
}

SparseMatrix EvoSystem::generator() const {
    return SparseMatrix(SparseMatrix(m1_tilde + drift.d_skew) + a_exterior);
}

double EvoSystem::energy(const Eigen::VectorXd& x) const {
    return x.dot(mass.cwiseProduct(m0.cwiseProduct(x)));
}

double EvoSystem::h_norm(const Eigen::VectorXd& x) const {
    return std::sqrt(x.dot(mass.cwiseProduct(x)));
}

EvoSystem assemble_system(const CylinderGrid& grid, int degree, const DriftSpec& drift,
                          Eigen::VectorXd m0_diag, SparseMatrix m1) {
    EvoSystem sys;
    sys.grid = &grid;
    sys.degree = degree;
    sys.size_u = grid.cells(degree);
    sys.size_w = grid.cells(degree + 1);
    const int n = sys.size();

    if (m0_diag.size() == 0) m0_diag = Eigen::VectorXd::Ones(n);
    if (m0_diag.size() != n) throw std::invalid_argument("assemble_system: M0 size mismatch");
    sys.c0 = m0_diag.minCoeff();
    if (!(sys.c0 > 0.0))
        throw std::invalid_argument("assemble_system: M0 must be strictly positive");

    sys.mass.resize(n);
    sys.mass << grid.mass(degree), grid.mass(degree + 1);
    sys.m0 = std::move(m0_diag);

    if (m1.rows() == 0) m1 = SparseMatrix(n, n);
    if (m1.rows() != n || m1.cols() != n)
        throw std::invalid_argument("assemble_system: M1 size mismatch");
    sys.m1 = std::move(m1);

    sys.a_exterior = assemble_exterior_block(grid, degree);
    sys.drift = assemble_drift_decomposition(grid, degree, drift, sys.m0);

    auto m1t = assemble_m1_tilde(sys.m1, sys.drift, sys.mass, sys.c0);
    sys.m1_tilde = std::move(m1t.m1_tilde);
    sys.m1_tilde_norm = m1t.norm;
    sys.m1_tilde_sym_norm = m1t.sym_norm;
    sys.rho0 = m1t.rho0;

    sys.skew_defect =
        skew_adjointness_defect(SparseMatrix(sys.drift.d_skew + sys.a_exterior), sys.mass);
    sys.max_drift_speed = drift.max_speed;
    return sys;
}

}  // namespace driftwave::evo
