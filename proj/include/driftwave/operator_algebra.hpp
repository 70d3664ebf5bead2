#pragma once

#include <Eigen/Dense>

#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Finite-dimensional operator calculus: adjoints, sym/skew splittings,
// resolvents, commutators and transmutators, accretivity classification,
// and residual checks for the algebraic identities the wave solver relies on.
//
// Operators are plain dense matrices over the real inner product; the mesh
// modules hold the sparse counterparts.  All functions here are pure and take
// explicit RNG engines where randomness is involved, so concurrent callers
// and sharded test runs stay deterministic.

namespace driftwave::algebra {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Shifted operator 1 + eta*C was numerically singular (condition number
// above kConditionLimit), i.e. eta lies outside the resolvent range.
class SingularOperatorError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kConditionLimit = 1e12;

bool is_finite(const Matrix& a);

// Adjoint with respect to the Euclidean inner product; an involution.
Matrix adjoint(const Matrix& a);

// sym C = (C + C*)/2, skew C = (C - C*)/2; sym + skew reconstructs C.
Matrix sym_part(const Matrix& c);
Matrix skew_part(const Matrix& c);

// [alpha, C] = alpha C - C alpha.
Matrix commutator(const Matrix& alpha, const Matrix& c);

// [L, C, R] = L C - C R; the commutator is the L = R case.
Matrix transmutator(const Matrix& l, const Matrix& c, const Matrix& r);

// (1 + eta C)^{-1}; eta = 0 returns the identity exactly.  Throws
// SingularOperatorError when 1 + eta C is numerically singular.
Matrix resolvent(const Matrix& c, double eta);

// Largest singular value.  Exact SVD up to 64x64, power iteration
// (tol 1e-10, at most 1e4 iterations) above.
double spectral_norm(const Matrix& a);

enum class AccretivityVerdict { accretive, quasi_m_accretive, neither };

const char* to_string(AccretivityVerdict v);

struct AccretivityReport {
    double min_sym_eigenvalue = 0.0;
    double eta0 = 0.0;
    double resolvent_norm_sup = 0.0;
    AccretivityVerdict verdict = AccretivityVerdict::neither;
};

// Classifies C by the sign of sym C and by sampling ||(1 + eta C)^{-1}|| on
// the uniform grid eta = eta0 * (i+1)/n_samples.  Interior singularities are
// detected only if the grid hits them; callers choose n_samples accordingly.
AccretivityReport check_accretivity(const Matrix& c, double eta0, int n_samples);

// Residual of [(1+eta C)^{-1}, alpha] = eta (1+eta C)^{-1} [alpha,C] (1+eta C)^{-1}
// in spectral norm.
double verify_resolvent_commutator(const Matrix& c, const Matrix& alpha, double eta);

struct ResolventCommutatorSweep {
    std::vector<double> eta;
    std::vector<double> commutator_norm;    // ||[(1+eta C)^{-1}, alpha]||
    std::vector<double> c_commutator_norm;  // ||C [(1+eta C)^{-1}, alpha]||
};

ResolventCommutatorSweep resolvent_commutator_sweep(const Matrix& c, const Matrix& alpha,
                                                    const std::vector<double>& etas);

// Max residual over the product identities
//   alpha C = C alpha + [alpha, C]
//   [alpha, C]* = [C*, alpha*]
//   (alpha C)* = alpha* C* + [C*, alpha*]
double verify_weak_equals_strong(const Matrix& c, const Matrix& alpha);

struct SkewDecompositionReport {
    double antisymmetry_residual = 0.0;
    double formula_residual = 0.0;
    double adjoint_formula_residual = 0.0;
    double max_residual() const;
};

// For symmetric alpha and quasi-skew C checks that skew(alpha C) is
// antisymmetric and satisfies
//   skew(alpha C)  =  alpha C - alpha sym(C) - (1/2)[C*, alpha]
//   skew(alpha C)* = -( (C - sym C) alpha + (1/2)[alpha, C] )
// Throws std::invalid_argument when alpha is not symmetric.
SkewDecompositionReport verify_skew_decomposition(const Matrix& alpha_sym,
                                                  const Matrix& c_quasi_skew);

struct SumTheoremReport {
    std::vector<double> epsilon;
    // ||[R*, (C+D)*, L*] + [L, C+D, R]*|| per family member.
    std::vector<double> adjoint_identity_residual;
    // (C+D)* L* vs (C* + D*) L*; exact in finite dimension.
    std::vector<double> adjoint_sum_residual;
    // max_x ||[L, C+D, R]* x|| / ||x|| over the sampled vectors.
    std::vector<double> transmutator_action_norm;
};

SumTheoremReport verify_sum_theorem(const Matrix& c, const Matrix& d,
                                    const std::vector<Matrix>& l_family,
                                    const std::vector<Matrix>& r_family,
                                    const std::vector<double>& epsilons,
                                    const std::vector<Vector>& samples);

// Block resolvent family
//   L_eps = diag((1 - eps S^T)^{-1}, (1 + eps S)^{-1})
//   R_eps = diag((1 + eps S)^{-1}, (1 - eps S^T)^{-1})
// for a square base operator S; used to probe the sum theorem the same way
// the solver treats the drift block.
std::pair<std::vector<Matrix>, std::vector<Matrix>>
resolvent_transmutator_family(const Matrix& s, const std::vector<double>& epsilons);

// Random operator generators: entries i.i.d. uniform on [-1, 1];
// quasi-skew operators are skew + sym_scale * symmetric.
Matrix random_matrix(std::mt19937_64& rng, int rows, int cols);
Matrix random_symmetric(std::mt19937_64& rng, int n);
Matrix random_skew(std::mt19937_64& rng, int n);
Matrix random_quasi_skew(std::mt19937_64& rng, int n, double sym_scale);
Vector random_vector(std::mt19937_64& rng, int n);

}  // namespace driftwave::algebra
