#pragma once

#include "driftwave/grid.hpp"

#include <functional>
#include <iosfwd>
#include <string>

// Discrete k-forms on a CylinderGrid and the first-order operators on them.
//
// The dirichlet variant of the derivative composes with the projector that
// zeroes boundary cells; a k-cochain supported on interior cells maps to a
// (k+1)-cochain that automatically vanishes on boundary cells, so the
// embedded operator agrees with the reduced subcomplex matrix.
//
// The Hodge star pairs each primal k-cell with its dual (3-k)-cell; the
// result is flagged `dual` and keeps the primal enumeration, so the star is
// a diagonal bijection and an exact isometry of the discrete inner products.

namespace driftwave::dec {

struct Cochain {
    int degree = 0;
    bool dual = false;  // values indexed by primal (3-degree)-cells when set
    const CylinderGrid* grid = nullptr;
    Eigen::VectorXd values;

    static Cochain zero(const CylinderGrid& grid, int degree);
    // Sample a smooth form: `component` receives the cell center and the
    // cell's direction mask and returns the form component; the cochain value
    // is component * primal cell volume (midpoint quadrature).
    static Cochain sample(const CylinderGrid& grid, int degree,
                          const std::function<double(const Eigen::Vector3d&, int dirs)>& component);
    int primal_degree() const { return dual ? 3 - degree : degree; }
};

struct VectorFieldSample {
    const CylinderGrid* grid = nullptr;
    std::array<Eigen::VectorXd, 3> component;  // per vertex

    static VectorFieldSample zero(const CylinderGrid& grid);
    static VectorFieldSample sample(const CylinderGrid& grid,
                                    const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& f);
    static VectorFieldSample constant(const CylinderGrid& grid, const Eigen::Vector3d& v);

    double max_magnitude() const;
    // Largest normal component on the lateral walls (tangency defect).
    double wall_normal_defect() const;
    // True when all components vanish on the two cap vertex layers of a
    // truncated axis (vacuously true on periodic grids).
    bool vanishes_near_caps(double tol = 0.0) const;
};

double inner_product(const Cochain& a, const Cochain& b);
double norm(const Cochain& c);

Cochain exterior_derivative(const Cochain& omega, Variant variant);
Cochain codifferential(const Cochain& omega, Variant variant);
Cochain hodge_star(const Cochain& omega);
Cochain interior_product(const VectorFieldSample& x, const Cochain& omega);
Cochain lie_derivative(const VectorFieldSample& x, const Cochain& omega);
Cochain covariant_derivative(const VectorFieldSample& x, const Cochain& omega);

// Sparse operator forms (full variant), acting on full-length cochains.
SparseMatrix interior_product_matrix(const VectorFieldSample& x, int degree);
SparseMatrix covariant_derivative_matrix(const VectorFieldSample& x, int degree);
SparseMatrix lie_derivative_matrix(const VectorFieldSample& x, int degree);
// Codifferential as a matrix: M_k^{-1} D_k^T M_{k+1} (chi_k-projected for
// the dirichlet variant).
SparseMatrix codifferential_matrix(const CylinderGrid& grid, int degree_from, Variant variant);

// Symmetric-part norm of the Lie derivative under the mass inner product,
// per degree, across a refinement sequence in the axial direction.
struct LieSkewnessReport {
    struct Level {
        int nz = 0;
        double h = 0.0;
        std::array<double, 4> sym_norm{};  // per degree
    };
    std::vector<Level> levels;
    bool quasi_skew = false;
    std::string detail;
};

// Builds the Lie derivative matrix per degree on each refinement level and
// measures ||sym||.  Throws std::invalid_argument for a truncated axis when
// the field does not vanish near the caps (transport through the caps breaks
// the integration-by-parts cancellation, so skewness genuinely fails there).
LieSkewnessReport lie_skew_symmetry_report(
    const GridSpec& base,
    const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& field,
    int refinement_levels = 2);

// Binary cochain IO: fixed little-endian layout with a small header
// (magic, version, degree, dual flag, grid hash, count) followed by the
// values as f64.
void write_cochain(std::ostream& out, const Cochain& c);
Cochain read_cochain(std::istream& in, const CylinderGrid& grid);

}  // namespace driftwave::dec
