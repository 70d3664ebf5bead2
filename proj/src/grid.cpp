#include "driftwave/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace driftwave::dec {

namespace {

constexpr int kTypeDirs[4][3] = {
    {0b000, -1, -1},        // vertices
    {0b001, 0b010, 0b100},  // x-, y-, z-edges
    {0b011, 0b101, 0b110},  // xy-, xz-, yz-faces
    {0b111, -1, -1},        // volumes
};

constexpr int kTypeCounts[4] = {1, 3, 3, 1};

int bit_position(int dirs, int axis) {
    // Position of `axis` within the sorted direction set.
    int pos = 0;
    for (int a = 0; a < axis; ++a)
        if (dirs & (1 << a)) ++pos;
    return pos;
}

}  // namespace

CylinderGrid CylinderGrid::cylinder(const GridSpec& spec) {
    return CylinderGrid({spec.nx, spec.ny, spec.nz}, {spec.lx, spec.ly, spec.lz},
                        {false, false, spec.axial == AxialTopology::periodic});
}

CylinderGrid CylinderGrid::torus3(int nx, int ny, int nz, double lx, double ly, double lz) {
    return CylinderGrid({nx, ny, nz}, {lx, ly, lz}, {true, true, true});
}

CylinderGrid::CylinderGrid(std::array<int, 3> n, std::array<double, 3> len,
                           std::array<bool, 3> periodic)
    : n_(n), len_(len), periodic_(periodic) {
    for (int a = 0; a < 3; ++a) {
        if (n_[a] < 2) throw std::invalid_argument("CylinderGrid: cell counts must be >= 2");
        if (!(len_[a] > 0.0)) throw std::invalid_argument("CylinderGrid: lengths must be positive");
        h_[a] = len_[a] / n_[a];
    }
    build_tables();
    build_incidence();
    build_mass();
    build_boundary();
}

double CylinderGrid::max_spacing() const { return std::max({h_[0], h_[1], h_[2]}); }

int CylinderGrid::type_count(int degree) {
    if (degree < 0 || degree > 3) throw std::invalid_argument("type_count: degree out of range");
    return kTypeCounts[degree];
}

int CylinderGrid::type_dirs(int degree, int type) {
    if (degree < 0 || degree > 3 || type < 0 || type >= kTypeCounts[degree])
        throw std::invalid_argument("type_dirs: bad degree/type");
    return kTypeDirs[degree][type];
}

void CylinderGrid::build_tables() {
    for (int k = 0; k <= 3; ++k) {
        int offset = 0;
        for (int t = 0; t < kTypeCounts[k]; ++t) {
            const int dirs = kTypeDirs[k][t];
            int size = 1;
            for (int a = 0; a < 3; ++a) {
                const bool spanned = dirs & (1 << a);
                const int ext = spanned ? n_[a] : (periodic_[a] ? n_[a] : n_[a] + 1);
                extents_[k][t][a] = ext;
                size *= ext;
            }
            offsets_[k][t] = offset;
            offset += size;
        }
        totals_[k] = offset;
    }
}

int CylinderGrid::extent(int degree, int type, int axis) const {
    return extents_[degree][type][axis];
}

int CylinderGrid::type_size(int degree, int type) const {
    return extents_[degree][type][0] * extents_[degree][type][1] * extents_[degree][type][2];
}

int CylinderGrid::type_offset(int degree, int type) const { return offsets_[degree][type]; }

int CylinderGrid::cells(int degree) const {
    if (degree < 0 || degree > 3) throw std::invalid_argument("cells: degree out of range");
    return totals_[degree];
}

int CylinderGrid::cell_index(int degree, int type, int i, int j, int k) const {
    const auto& ext = extents_[degree][type];
    return offsets_[degree][type] + i + ext[0] * (j + ext[1] * k);
}

void CylinderGrid::cell_coords(int degree, int index, int& type, int& i, int& j, int& k) const {
    for (int t = kTypeCounts[degree] - 1; t >= 0; --t) {
        if (index >= offsets_[degree][t]) {
            type = t;
            int rest = index - offsets_[degree][t];
            const auto& ext = extents_[degree][t];
            i = rest % ext[0];
            rest /= ext[0];
            j = rest % ext[1];
            k = rest / ext[1];
            return;
        }
    }
    throw std::out_of_range("cell_coords: index out of range");
}

Eigen::Vector3d CylinderGrid::vertex_position(int i, int j, int k) const {
    return {i * h_[0], j * h_[1], k * h_[2]};
}

Eigen::Vector3d CylinderGrid::cell_center(int degree, int index) const {
    int type, c[3];
    cell_coords(degree, index, type, c[0], c[1], c[2]);
    const int dirs = kTypeDirs[degree][type];
    Eigen::Vector3d p;
    for (int a = 0; a < 3; ++a)
        p(a) = (dirs & (1 << a)) ? (c[a] + 0.5) * h_[a] : c[a] * h_[a];
    return p;
}

void CylinderGrid::build_incidence() {
    for (int k = 0; k < 3; ++k) {
        std::vector<Eigen::Triplet<double>> trips;
        const int kk = k + 1;
        for (int t = 0; t < kTypeCounts[kk]; ++t) {
            const int dirs = kTypeDirs[kk][t];
            const auto& ext = extents_[kk][t];
            for (int ck = 0; ck < ext[2]; ++ck)
                for (int cj = 0; cj < ext[1]; ++cj)
                    for (int ci = 0; ci < ext[0]; ++ci) {
                        const int row = cell_index(kk, t, ci, cj, ck);
                        const int coords[3] = {ci, cj, ck};
                        for (int m = 0; m < 3; ++m) {
                            if (!(dirs & (1 << m))) continue;
                            const int face_dirs = dirs & ~(1 << m);
                            int face_type = 0;
                            while (kTypeDirs[k][face_type] != face_dirs) ++face_type;
                            const double sign = (bit_position(dirs, m) % 2 == 0) ? 1.0 : -1.0;

                            int lo[3] = {coords[0], coords[1], coords[2]};
                            int hi[3] = {coords[0], coords[1], coords[2]};
                            hi[m] = coords[m] + 1;
                            if (periodic_[m] && hi[m] == n_[m]) hi[m] = 0;

                            trips.emplace_back(row,
                                               cell_index(k, face_type, hi[0], hi[1], hi[2]),
                                               sign);
                            trips.emplace_back(row,
                                               cell_index(k, face_type, lo[0], lo[1], lo[2]),
                                               -sign);
                        }
                    }
        }
        SparseMatrix d(totals_[kk], totals_[k]);
        d.setFromTriplets(trips.begin(), trips.end());
        d.makeCompressed();
        incidence_[k] = std::move(d);
    }
}

void CylinderGrid::build_mass() {
    for (int k = 0; k <= 3; ++k) {
        Eigen::VectorXd w(totals_[k]);
        for (int t = 0; t < kTypeCounts[k]; ++t) {
            const int dirs = kTypeDirs[k][t];
            const auto& ext = extents_[k][t];
            for (int ck = 0; ck < ext[2]; ++ck)
                for (int cj = 0; cj < ext[1]; ++cj)
                    for (int ci = 0; ci < ext[0]; ++ci) {
                        const int coords[3] = {ci, cj, ck};
                        double weight = 1.0;
                        for (int a = 0; a < 3; ++a) {
                            if (dirs & (1 << a)) {
                                weight /= h_[a];  // primal length
                            } else {
                                double dual = h_[a];
                                if (!periodic_[a] && (coords[a] == 0 || coords[a] == n_[a]))
                                    dual *= 0.5;  // clipped dual cell at walls/caps
                                weight *= dual;
                            }
                        }
                        w(cell_index(k, t, ci, cj, ck)) = weight;
                    }
        }
        mass_[k] = std::move(w);
    }
}

void CylinderGrid::build_boundary() {
    for (int k = 0; k <= 3; ++k) {
        std::vector<char> mask(totals_[k], 0);
        Eigen::VectorXd interior = Eigen::VectorXd::Ones(totals_[k]);
        for (int t = 0; t < kTypeCounts[k]; ++t) {
            const int dirs = kTypeDirs[k][t];
            const auto& ext = extents_[k][t];
            for (int ck = 0; ck < ext[2]; ++ck)
                for (int cj = 0; cj < ext[1]; ++cj)
                    for (int ci = 0; ci < ext[0]; ++ci) {
                        const int coords[3] = {ci, cj, ck};
                        bool on_boundary = false;
                        for (int a = 0; a < 3 && !on_boundary; ++a) {
                            if (dirs & (1 << a)) continue;  // spans the axis, crosses interior
                            if (periodic_[a]) continue;
                            if (coords[a] == 0 || coords[a] == n_[a]) on_boundary = true;
                        }
                        if (on_boundary) {
                            const int idx = cell_index(k, t, ci, cj, ck);
                            mask[idx] = 1;
                            interior(idx) = 0.0;
                        }
                    }
        }
        boundary_[k] = std::move(mask);
        interior_[k] = std::move(interior);
    }
}

const SparseMatrix& CylinderGrid::incidence(int degree) const {
    if (degree < 0 || degree > 2)
        throw std::invalid_argument("incidence: degree must be in 0..2");
    return incidence_[degree];
}

const Eigen::VectorXd& CylinderGrid::mass(int degree) const {
    if (degree < 0 || degree > 3) throw std::invalid_argument("mass: degree out of range");
    return mass_[degree];
}

const std::vector<char>& CylinderGrid::boundary_mask(int degree) const {
    if (degree < 0 || degree > 3)
        throw std::invalid_argument("boundary_mask: degree out of range");
    return boundary_[degree];
}

const Eigen::VectorXd& CylinderGrid::interior_indicator(int degree) const {
    if (degree < 0 || degree > 3)
        throw std::invalid_argument("interior_indicator: degree out of range");
    return interior_[degree];
}

std::vector<int> CylinderGrid::interior_cells(int degree) const {
    std::vector<int> idx;
    const auto& mask = boundary_mask(degree);
    for (int i = 0; i < totals_[degree]; ++i)
        if (!mask[i]) idx.push_back(i);
    return idx;
}

SparseMatrix CylinderGrid::derivative_matrix(int degree, Variant variant) const {
    const SparseMatrix& d = incidence(degree);
    if (variant == Variant::full) return d;

    const auto rows = interior_cells(degree + 1);
    const auto cols = interior_cells(degree);
    std::vector<int> row_map(totals_[degree + 1], -1), col_map(totals_[degree], -1);
    for (std::size_t i = 0; i < rows.size(); ++i) row_map[rows[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < cols.size(); ++i) col_map[cols[i]] = static_cast<int>(i);

    std::vector<Eigen::Triplet<double>> trips;
    for (int c = 0; c < d.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(d, c); it; ++it) {
            const int r = static_cast<int>(it.row());
            if (row_map[r] >= 0 && col_map[c] >= 0)
                trips.emplace_back(row_map[r], col_map[c], it.value());
        }
    SparseMatrix reduced(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    reduced.setFromTriplets(trips.begin(), trips.end());
    reduced.makeCompressed();
    return reduced;
}

std::uint64_t CylinderGrid::hash() const {
    // FNV-1a over the defining fields.
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    for (int a = 0; a < 3; ++a) {
        mix(static_cast<std::uint64_t>(n_[a]));
        std::uint64_t bits;
        static_assert(sizeof(double) == sizeof(std::uint64_t));
        std::memcpy(&bits, &len_[a], sizeof(bits));
        mix(bits);
        mix(periodic_[a] ? 1 : 0);
    }
    return h;
}

}  // namespace driftwave::dec
