#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

// Structured cubical complex on a flat cylinder: cross-section rectangle
// [0,lx] x [0,ly] (walls) times an axial direction that is either periodic
// (torus) or truncated.  A fully periodic variant backs the Cartesian runs.
//
// A k-cell is a direction set S (|S| = k, encoded as a 3-bit mask) plus
// integer coordinates: edge indices 0..n-1 along spanned axes, vertex indices
// along the others (0..n-1 periodic, 0..n otherwise).  Cochain values are the
// integrals of a k-form over the oriented cells, so the exterior derivative
// is the signed incidence matrix with entries in {-1, 0, +1} and d.d = 0
// holds exactly in integer arithmetic.

namespace driftwave::dec {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class AxialTopology { periodic, truncated };

enum class Variant { dirichlet, full };

struct GridSpec {
    int nx = 2, ny = 2, nz = 2;
    double lx = 1.0, ly = 1.0, lz = 1.0;
    AxialTopology axial = AxialTopology::periodic;
};

class CylinderGrid {
  public:
    // Cross-section walls in x and y, axial topology from the GridSpec.
    static CylinderGrid cylinder(const GridSpec& spec);
    // Periodic in all three axes.
    static CylinderGrid torus3(int nx, int ny, int nz, double lx, double ly, double lz);

    int n(int axis) const { return n_[axis]; }
    double length(int axis) const { return len_[axis]; }
    double spacing(int axis) const { return h_[axis]; }
    bool periodic(int axis) const { return periodic_[axis]; }
    AxialTopology axial_topology() const {
        return periodic_[2] ? AxialTopology::periodic : AxialTopology::truncated;
    }
    double max_spacing() const;

    // Direction sets per degree, ordered by increasing bitmask
    // (k=1: x,y,z; k=2: xy, xz, yz).
    static int type_count(int degree);
    static int type_dirs(int degree, int type);

    // Vertex count along `axis` for cells not spanning it, edge count otherwise.
    int extent(int degree, int type, int axis) const;
    int type_size(int degree, int type) const;
    int type_offset(int degree, int type) const;
    int cells(int degree) const;

    int cell_index(int degree, int type, int i, int j, int k) const;
    void cell_coords(int degree, int index, int& type, int& i, int& j, int& k) const;
    Eigen::Vector3d cell_center(int degree, int index) const;
    Eigen::Vector3d vertex_position(int i, int j, int k) const;

    // Signed incidence: k-cochains -> (k+1)-cochains, entries in {-1,0,+1}.
    const SparseMatrix& incidence(int degree) const;

    // Diagonal inner-product weights (dual volume / primal volume per cell);
    // a 0-cochain of ones has total mass lx*ly*lz exactly.
    const Eigen::VectorXd& mass(int degree) const;

    // 1 where the cell lies inside the domain boundary (all spanned
    // directions tangent to a wall or, on truncated axes, a cap).
    const std::vector<char>& boundary_mask(int degree) const;

    // Indicator of interior cells as a vector of 0/1 (complement of the mask).
    const Eigen::VectorXd& interior_indicator(int degree) const;

    // Derivative matrix for a variant.  `full` is the incidence matrix;
    // `dirichlet` is the subcomplex matrix with boundary rows and columns
    // removed.  For the same-size embedded form use incidence * projector.
    SparseMatrix derivative_matrix(int degree, Variant variant) const;

    // Interior index list used by the reduced dirichlet matrices.
    std::vector<int> interior_cells(int degree) const;

    std::uint64_t hash() const;

  private:
    CylinderGrid(std::array<int, 3> n, std::array<double, 3> len, std::array<bool, 3> periodic);

    void build_tables();
    void build_incidence();
    void build_mass();
    void build_boundary();

    std::array<int, 3> n_;
    std::array<double, 3> len_;
    std::array<double, 3> h_;
    std::array<bool, 3> periodic_;

    // extents_[degree][type][axis], offsets_[degree][type], totals_[degree]
    std::array<std::array<std::array<int, 3>, 3>, 4> extents_{};
    std::array<std::array<int, 3>, 4> offsets_{};
    std::array<int, 4> totals_{};

    std::array<SparseMatrix, 3> incidence_;
    std::array<Eigen::VectorXd, 4> mass_;
    std::array<std::vector<char>, 4> boundary_;
    std::array<Eigen::VectorXd, 4> interior_;
};

}  // namespace driftwave::dec
