#pragma once

#include <Eigen/Dense>

#include <stdexcept>

// Change of unknowns absorbing a constant axial drift of speed v0 into a
// material block:
//
//   (p~, v~) = [[1, v0 e3^T], [v0 e3, 1]] (p, v),
//
// with the block M0(v0) carrying 1/(1-v0^2) on the diagonal and
// -v0/(1-v0^2) coupling p to v3.  The transform and M0 degenerate at
// |v0| = 1 and M0 loses positivity for |v0| > 1; the direct four-field
// formulation has no such restriction, which is exactly what the solver's
// Mach-robustness checks exercise.

namespace driftwave::cart {

class SingularTransformError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// [[1, v0 e3^T],[v0 e3, I]] acting on stacked (p, v1, v2, v3).
Eigen::Matrix4d bi_isotropic_matrix(double v0);

// Inverse of the transform; throws SingularTransformError at |v0| = 1.
Eigen::Matrix4d bi_isotropic_inverse(double v0);

struct BiIsotropicMaterial {
    double v0 = 0.0;
    Eigen::Matrix4d m0;
    Eigen::Vector4d eigenvalues;  // ascending
    bool positive_definite = false;
    bool indefinite = false;  // some eigenvalue negative (|v0| > 1)
};

// M0(v0) with its eigenvalue check; throws SingularTransformError at |v0|=1.
BiIsotropicMaterial bi_isotropic_material(double v0);

inline Eigen::Vector4d bi_isotropic_transform(const Eigen::Vector4d& pv, double v0) {
    return bi_isotropic_matrix(v0) * pv;
}

inline Eigen::Vector4d bi_isotropic_inverse_transform(const Eigen::Vector4d& pv, double v0) {
    return bi_isotropic_inverse(v0) * pv;
}

}  // namespace driftwave::cart
