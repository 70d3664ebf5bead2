#include "driftwave/bi_isotropic.hpp"

#include <cmath>

namespace driftwave::cart {

namespace {
constexpr double kDegenerateTol = 1e-14;

double one_minus_v0_squared(double v0, const char* what) {
    const double denom = 1.0 - v0 * v0;
    if (std::abs(denom) < kDegenerateTol)
        throw SingularTransformError(std::string(what) +
                                     ": transform is singular at Mach one (|v0| = 1)");
    return denom;
}
}  // namespace

Eigen::Matrix4d bi_isotropic_matrix(double v0) {
    Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
    t(0, 3) = v0;
    t(3, 0) = v0;
    return t;
}

Eigen::Matrix4d bi_isotropic_inverse(double v0) {
    const double denom = one_minus_v0_squared(v0, "bi_isotropic_inverse");
    Eigen::Matrix4d inv = Eigen::Matrix4d::Identity();
    inv(0, 0) = 1.0 / denom;
    inv(3, 3) = 1.0 / denom;
    inv(0, 3) = -v0 / denom;
    inv(3, 0) = -v0 / denom;
    return inv;
}

BiIsotropicMaterial bi_isotropic_material(double v0) {
    const double denom = one_minus_v0_squared(v0, "bi_isotropic_material");
    BiIsotropicMaterial mat;
    mat.v0 = v0;
    mat.m0 = Eigen::Matrix4d::Identity() / denom;
    mat.m0(0, 3) = -v0 / denom;
    mat.m0(3, 0) = -v0 / denom;

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(mat.m0);
    mat.eigenvalues = eig.eigenvalues();
    mat.positive_definite = mat.eigenvalues.minCoeff() > 0.0;
    mat.indefinite = mat.eigenvalues.minCoeff() < 0.0;
    return mat;
}

}  // namespace driftwave::cart
