#include "driftwave/exterior_calculus.hpp"

#include "driftwave/sparse_norms.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

namespace driftwave::dec {

namespace {

void require_grid(const Cochain& c, const char* what) {
    if (!c.grid) throw std::invalid_argument(std::string(what) + ": cochain has no grid");
    if (c.values.size() != c.grid->cells(c.primal_degree()))
        throw std::invalid_argument(std::string(what) + ": value count does not match grid");
}

int bit_position(int dirs, int axis) {
    int pos = 0;
    for (int a = 0; a < axis; ++a)
        if (dirs & (1 << a)) ++pos;
    return pos;
}

int type_from_dirs(int degree, int dirs) {
    for (int t = 0; t < CylinderGrid::type_count(degree); ++t)
        if (CylinderGrid::type_dirs(degree, t) == dirs) return t;
    throw std::logic_error("type_from_dirs: no such direction set");
}

// Average of a vertex field component over the corner vertices of a cell.
double corner_average(const CylinderGrid& g, const Eigen::VectorXd& vertex_values, int dirs,
                      const int coords[3]) {
    double sum = 0.0;
    int count = 0;
    const int spanned[3] = {dirs & 1, (dirs >> 1) & 1, (dirs >> 2) & 1};
    for (int cz = 0; cz <= spanned[2]; ++cz)
        for (int cy = 0; cy <= spanned[1]; ++cy)
            for (int cx = 0; cx <= spanned[0]; ++cx) {
                int v[3] = {coords[0] + cx, coords[1] + cy, coords[2] + cz};
                for (int a = 0; a < 3; ++a)
                    if (g.periodic(a) && v[a] == g.n(a)) v[a] = 0;
                sum += vertex_values(g.cell_index(0, 0, v[0], v[1], v[2]));
                ++count;
            }
    return sum / count;
}

}  // namespace

Cochain Cochain::zero(const CylinderGrid& grid, int degree) {
    if (degree < 0 || degree > 3) throw std::invalid_argument("Cochain::zero: bad degree");
    return {degree, false, &grid, Eigen::VectorXd::Zero(grid.cells(degree))};
}

Cochain Cochain::sample(const CylinderGrid& grid, int degree,
                        const std::function<double(const Eigen::Vector3d&, int)>& component) {
    Cochain c = zero(grid, degree);
    for (int t = 0; t < CylinderGrid::type_count(degree); ++t) {
        const int dirs = CylinderGrid::type_dirs(degree, t);
        double volume = 1.0;
        for (int a = 0; a < 3; ++a)
            if (dirs & (1 << a)) volume *= grid.spacing(a);
        for (int k = 0; k < grid.extent(degree, t, 2); ++k)
            for (int j = 0; j < grid.extent(degree, t, 1); ++j)
                for (int i = 0; i < grid.extent(degree, t, 0); ++i) {
                    const int idx = grid.cell_index(degree, t, i, j, k);
                    c.values(idx) = component(grid.cell_center(degree, idx), dirs) * volume;
                }
    }
    return c;
}

VectorFieldSample VectorFieldSample::zero(const CylinderGrid& grid) {
    VectorFieldSample x;
    x.grid = &grid;
    for (auto& c : x.component) c = Eigen::VectorXd::Zero(grid.cells(0));
    return x;
}

VectorFieldSample VectorFieldSample::sample(
    const CylinderGrid& grid, const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& f) {
    VectorFieldSample x = zero(grid);
    for (int k = 0; k < grid.extent(0, 0, 2); ++k)
        for (int j = 0; j < grid.extent(0, 0, 1); ++j)
            for (int i = 0; i < grid.extent(0, 0, 0); ++i) {
                const int idx = grid.cell_index(0, 0, i, j, k);
                const Eigen::Vector3d v = f(grid.vertex_position(i, j, k));
                for (int a = 0; a < 3; ++a) x.component[a](idx) = v(a);
            }
    return x;
}

VectorFieldSample VectorFieldSample::constant(const CylinderGrid& grid, const Eigen::Vector3d& v) {
    return sample(grid, [&v](const Eigen::Vector3d&) { return v; });
}

double VectorFieldSample::max_magnitude() const {
    double m = 0.0;
    for (int i = 0; i < component[0].size(); ++i) {
        const double s = Eigen::Vector3d(component[0](i), component[1](i), component[2](i)).norm();
        m = std::max(m, s);
    }
    return m;
}

double VectorFieldSample::wall_normal_defect() const {
    const CylinderGrid& g = *grid;
    double defect = 0.0;
    for (int k = 0; k < g.extent(0, 0, 2); ++k)
        for (int j = 0; j < g.extent(0, 0, 1); ++j)
            for (int i = 0; i < g.extent(0, 0, 0); ++i) {
                const int idx = g.cell_index(0, 0, i, j, k);
                const int coords[3] = {i, j, k};
                for (int a = 0; a < 2; ++a) {  // lateral walls only
                    if (g.periodic(a)) continue;
                    if (coords[a] == 0 || coords[a] == g.n(a))
                        defect = std::max(defect, std::abs(component[a](idx)));
                }
            }
    return defect;
}

bool VectorFieldSample::vanishes_near_caps(double tol) const {
    const CylinderGrid& g = *grid;
    if (g.periodic(2)) return true;
    for (int k : {0, 1, g.n(2) - 1, g.n(2)})
        for (int j = 0; j < g.extent(0, 0, 1); ++j)
            for (int i = 0; i < g.extent(0, 0, 0); ++i) {
                const int idx = g.cell_index(0, 0, i, j, k);
                for (int a = 0; a < 3; ++a)
                    if (std::abs(component[a](idx)) > tol) return false;
            }
    return true;
}

double inner_product(const Cochain& a, const Cochain& b) {
    require_grid(a, "inner_product");
    require_grid(b, "inner_product");
    if (a.degree != b.degree || a.dual != b.dual || a.grid != b.grid)
        throw std::invalid_argument("inner_product: cochains live in different spaces");
    const Eigen::VectorXd& w = a.grid->mass(a.primal_degree());
    if (a.dual) return (a.values.array() * b.values.array() / w.array()).sum();
    return (a.values.array() * b.values.array() * w.array()).sum();
}

double norm(const Cochain& c) { return std::sqrt(inner_product(c, c)); }

Cochain exterior_derivative(const Cochain& omega, Variant variant) {
    require_grid(omega, "exterior_derivative");
    if (omega.dual)
        throw std::invalid_argument("exterior_derivative: expected a primal cochain");
    if (omega.degree >= 3)
        throw std::invalid_argument("exterior_derivative: no 4-forms in three dimensions");
    const CylinderGrid& g = *omega.grid;
    Cochain out = Cochain::zero(g, omega.degree + 1);
    if (variant == Variant::dirichlet) {
        const Eigen::VectorXd constrained =
            omega.values.cwiseProduct(g.interior_indicator(omega.degree));
        out.values = g.incidence(omega.degree) * constrained;
    } else {
        out.values = g.incidence(omega.degree) * omega.values;
    }
    return out;
}

SparseMatrix codifferential_matrix(const CylinderGrid& grid, int degree_from, Variant variant) {
    if (degree_from < 1 || degree_from > 3)
        throw std::invalid_argument("codifferential: degree must be in 1..3");
    const int k = degree_from - 1;
    const SparseMatrix& d = grid.incidence(k);
    const Eigen::VectorXd& mk = grid.mass(k);
    const Eigen::VectorXd& mk1 = grid.mass(degree_from);
    const Eigen::VectorXd& chi = grid.interior_indicator(k);

    SparseMatrix dt = d.transpose();
    for (int c = 0; c < dt.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(dt, c); it; ++it) {
            double v = it.value() * mk1(c) / mk(it.row());
            if (variant == Variant::dirichlet) v *= chi(it.row());
            it.valueRef() = v;
        }
    dt.prune(0.0);
    return dt;
}

Cochain codifferential(const Cochain& omega, Variant variant) {
    require_grid(omega, "codifferential");
    if (omega.dual) throw std::invalid_argument("codifferential: expected a primal cochain");
    if (omega.degree < 1)
        throw std::invalid_argument("codifferential: degree 0 has no codifferential");
    Cochain out = Cochain::zero(*omega.grid, omega.degree - 1);
    out.values = codifferential_matrix(*omega.grid, omega.degree, variant) * omega.values;
    return out;
}

Cochain hodge_star(const Cochain& omega) {
    require_grid(omega, "hodge_star");
    const CylinderGrid& g = *omega.grid;
    const int pk = omega.primal_degree();
    const Eigen::VectorXd& w = g.mass(pk);
    Cochain out;
    out.grid = &g;
    out.degree = 3 - omega.degree;
    out.dual = !omega.dual;
    // In three dimensions (-1)^{k(3-k)} = +1 for every k, so the double star
    // is the identity with no sign.
    if (omega.dual)
        out.values = omega.values.cwiseQuotient(w);
    else
        out.values = omega.values.cwiseProduct(w);
    return out;
}

SparseMatrix interior_product_matrix(const VectorFieldSample& x, int degree) {
    if (degree < 1 || degree > 3)
        throw std::invalid_argument("interior_product: degree must be in 1..3");
    const CylinderGrid& g = *x.grid;
    const int out_degree = degree - 1;
    std::vector<Eigen::Triplet<double>> trips;

    for (int t = 0; t < CylinderGrid::type_count(out_degree); ++t) {
        const int out_dirs = CylinderGrid::type_dirs(out_degree, t);
        for (int ck = 0; ck < g.extent(out_degree, t, 2); ++ck)
            for (int cj = 0; cj < g.extent(out_degree, t, 1); ++cj)
                for (int ci = 0; ci < g.extent(out_degree, t, 0); ++ci) {
                    const int row = g.cell_index(out_degree, t, ci, cj, ck);
                    const int coords[3] = {ci, cj, ck};
                    for (int m = 0; m < 3; ++m) {
                        if (out_dirs & (1 << m)) continue;
                        const int src_dirs = out_dirs | (1 << m);
                        const int src_type = type_from_dirs(degree, src_dirs);
                        const double sign =
                            (bit_position(src_dirs, m) % 2 == 0) ? 1.0 : -1.0;
                        const double xm = corner_average(g, x.component[m], out_dirs, coords);
                        if (xm == 0.0) continue;

                        // k-cells spanning axis m on both sides of this cell.
                        int candidates[2] = {coords[m] - 1, coords[m]};
                        int valid[2];
                        int count = 0;
                        for (int e : candidates) {
                            if (g.periodic(m)) {
                                if (e < 0) e += g.n(m);
                                valid[count++] = e;
                            } else if (e >= 0 && e < g.n(m)) {
                                valid[count++] = e;
                            }
                        }
                        const double weight = sign * xm / (g.spacing(m) * count);
                        for (int q = 0; q < count; ++q) {
                            int src[3] = {coords[0], coords[1], coords[2]};
                            src[m] = valid[q];
                            trips.emplace_back(
                                row, g.cell_index(degree, src_type, src[0], src[1], src[2]),
                                weight);
                        }
                    }
                }
    }
    SparseMatrix mat(g.cells(out_degree), g.cells(degree));
    mat.setFromTriplets(trips.begin(), trips.end());
    mat.makeCompressed();
    return mat;
}

SparseMatrix covariant_derivative_matrix(const VectorFieldSample& x, int degree) {
    const CylinderGrid& g = *x.grid;
    std::vector<Eigen::Triplet<double>> trips;

    for (int t = 0; t < CylinderGrid::type_count(degree); ++t) {
        const int dirs = CylinderGrid::type_dirs(degree, t);
        for (int ck = 0; ck < g.extent(degree, t, 2); ++ck)
            for (int cj = 0; cj < g.extent(degree, t, 1); ++cj)
                for (int ci = 0; ci < g.extent(degree, t, 0); ++ci) {
                    const int row = g.cell_index(degree, t, ci, cj, ck);
                    const int coords[3] = {ci, cj, ck};
                    for (int a = 0; a < 3; ++a) {
                        const double xa = corner_average(g, x.component[a], dirs, coords);
                        if (xa == 0.0) continue;
                        const int ext = g.extent(degree, t, a);
                        int up = coords[a] + 1, down = coords[a] - 1;
                        double scale = xa / (2.0 * g.spacing(a));
                        if (g.periodic(a)) {
                            if (up >= ext) up -= ext;
                            if (down < 0) down += ext;
                        } else if (up >= ext || down < 0) {
                            // one-sided difference at caps and walls
                            scale = xa / g.spacing(a);
                            if (up >= ext) up = coords[a];
                            if (down < 0) down = coords[a];
                            if (up == down) continue;
                        }
                        int cu[3] = {coords[0], coords[1], coords[2]};
                        int cd[3] = {coords[0], coords[1], coords[2]};
                        cu[a] = up;
                        cd[a] = down;
                        trips.emplace_back(row, g.cell_index(degree, t, cu[0], cu[1], cu[2]),
                                           scale);
                        trips.emplace_back(row, g.cell_index(degree, t, cd[0], cd[1], cd[2]),
                                           -scale);
                    }
                }
    }
    SparseMatrix mat(g.cells(degree), g.cells(degree));
    mat.setFromTriplets(trips.begin(), trips.end());
    mat.makeCompressed();
    return mat;
}

SparseMatrix lie_derivative_matrix(const VectorFieldSample& x, int degree) {
    const CylinderGrid& g = *x.grid;
    const int n = g.cells(degree);
    SparseMatrix lie(n, n);
    if (degree < 3) {
        const SparseMatrix up = interior_product_matrix(x, degree + 1) * g.incidence(degree);
        lie = up;
    }
    if (degree > 0) {
        const SparseMatrix down = g.incidence(degree - 1) * interior_product_matrix(x, degree);
        lie = (degree < 3) ? SparseMatrix(lie + down) : down;
    }
    lie.makeCompressed();
    return lie;
}

Cochain interior_product(const VectorFieldSample& x, const Cochain& omega) {
    require_grid(omega, "interior_product");
    if (omega.dual) throw std::invalid_argument("interior_product: expected a primal cochain");
    if (omega.degree < 1)
        throw std::invalid_argument("interior_product: degree 0 forms contract to zero");
    if (x.grid != omega.grid)
        throw std::invalid_argument("interior_product: field and form on different grids");
    Cochain out = Cochain::zero(*omega.grid, omega.degree - 1);
    out.values = interior_product_matrix(x, omega.degree) * omega.values;
    return out;
}

Cochain covariant_derivative(const VectorFieldSample& x, const Cochain& omega) {
    require_grid(omega, "covariant_derivative");
    if (omega.dual)
        throw std::invalid_argument("covariant_derivative: expected a primal cochain");
    if (x.grid != omega.grid)
        throw std::invalid_argument("covariant_derivative: field and form on different grids");
    Cochain out = Cochain::zero(*omega.grid, omega.degree);
    out.values = covariant_derivative_matrix(x, omega.degree) * omega.values;
    return out;
}

Cochain lie_derivative(const VectorFieldSample& x, const Cochain& omega) {
    require_grid(omega, "lie_derivative");
    if (omega.dual) throw std::invalid_argument("lie_derivative: expected a primal cochain");
    if (x.grid != omega.grid)
        throw std::invalid_argument("lie_derivative: field and form on different grids");
    Cochain out = Cochain::zero(*omega.grid, omega.degree);
    out.values = lie_derivative_matrix(x, omega.degree) * omega.values;
    return out;
}

LieSkewnessReport lie_skew_symmetry_report(
    const GridSpec& base, const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& field,
    int refinement_levels) {
    if (refinement_levels < 1)
        throw std::invalid_argument("lie_skew_symmetry_report: need at least one level");
    LieSkewnessReport report;
    for (int level = 0; level < refinement_levels; ++level) {
        GridSpec spec = base;
        const int f = 1 << level;
        spec.nx *= f;
        spec.ny *= f;
        spec.nz *= f;
        const CylinderGrid grid = CylinderGrid::cylinder(spec);
        const VectorFieldSample x = VectorFieldSample::sample(grid, field);
        if (grid.axial_topology() == AxialTopology::truncated && !x.vanishes_near_caps(0.0))
            throw std::invalid_argument(
                "lie_skew_symmetry_report: truncated axis with a field that does not vanish "
                "near the caps; axial transport through the caps has no counterpart in the "
                "integration by parts, so the Lie derivative cannot be skew there. Use a "
                "periodic axis or a compactly supported field.");

        LieSkewnessReport::Level lv;
        lv.nz = spec.nz;
        lv.h = grid.max_spacing();
        for (int k = 0; k <= 3; ++k) {
            const SparseMatrix lie = lie_derivative_matrix(x, k);
            lv.sym_norm[k] = sparse_weighted_sym_norm(lie, grid.mass(k));
        }
        report.levels.push_back(lv);
    }

    report.quasi_skew = true;
    for (std::size_t l = 1; l < report.levels.size(); ++l)
        for (int k = 0; k <= 3; ++k)
            if (report.levels[l].sym_norm[k] >
                report.levels[l - 1].sym_norm[k] * 1.2 + 1e-9)
                report.quasi_skew = false;

    std::ostringstream detail;
    for (const auto& lv : report.levels) {
        detail << "nz=" << lv.nz << " sym_norms";
        for (int k = 0; k <= 3; ++k) detail << ' ' << lv.sym_norm[k];
        detail << '\n';
    }
    report.detail = detail.str();
    return report;
}

namespace {
constexpr char kMagic[4] = {'D', 'W', 'C', '1'};
}

void write_cochain(std::ostream& out, const Cochain& c) {
    require_grid(c, "write_cochain");
    out.write(kMagic, 4);
    const std::uint32_t degree = static_cast<std::uint32_t>(c.degree);
    const std::uint32_t dual = c.dual ? 1 : 0;
    const std::uint64_t hash = c.grid->hash();
    const std::uint64_t count = static_cast<std::uint64_t>(c.values.size());
    out.write(reinterpret_cast<const char*>(&degree), sizeof(degree));
    out.write(reinterpret_cast<const char*>(&dual), sizeof(dual));
    out.write(reinterpret_cast<const char*>(&hash), sizeof(hash));
    out.write(reinterpret_cast<const char*>(&count), sizeof(count));
    out.write(reinterpret_cast<const char*>(c.values.data()),
              static_cast<std::streamsize>(count * sizeof(double)));
}

Cochain read_cochain(std::istream& in, const CylinderGrid& grid) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("read_cochain: bad magic");
    std::uint32_t degree = 0, dual = 0;
    std::uint64_t hash = 0, count = 0;
    in.read(reinterpret_cast<char*>(&degree), sizeof(degree));
    in.read(reinterpret_cast<char*>(&dual), sizeof(dual));
    in.read(reinterpret_cast<char*>(&hash), sizeof(hash));
    in.read(reinterpret_cast<char*>(&count), sizeof(count));
    if (!in) throw std::runtime_error("read_cochain: truncated header");
    if (hash != grid.hash()) throw std::runtime_error("read_cochain: grid hash mismatch");
    Cochain c;
    c.degree = static_cast<int>(degree);
    c.dual = dual != 0;
    c.grid = &grid;
    if (count != static_cast<std::uint64_t>(grid.cells(c.primal_degree())))
        throw std::runtime_error("read_cochain: value count does not match grid");
    c.values.resize(static_cast<Eigen::Index>(count));
    in.read(reinterpret_cast<char*>(c.values.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw std::runtime_error("read_cochain: truncated values");
    return c;
}

}  // namespace driftwave::dec
