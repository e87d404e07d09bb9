#pragma once

// Dense complex linear algebra on the small spaces used here (dim 2..16):
// Kronecker products, partial traces, Hermitian eigensolver, entropies and
// Haar-random sampling. States carry their tensor-factor layout explicitly.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qnm {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Dims = std::vector<std::size_t>;

inline constexpr std::size_t kMaxDim = 16;

namespace tol {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kPositivity = 1e-10;
inline constexpr double kNorm = 1e-12;
inline constexpr double kEigInput = 1e-8;
} // namespace tol

/// Largest absolute entry of m - m^dagger.
double hermiticity_defect(const Matrix& m);

/// Density operator on a tensor product of factors with dimensions `dims`.
/// Construction validates Hermiticity, unit trace and positivity.
class DensityMatrix {
  public:
    DensityMatrix(Matrix mat, Dims dims);

    const Matrix& matrix() const { return mat_; }
    const Dims& dims() const { return dims_; }
    std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }

    double purity() const;

  private:
    Matrix mat_;
    Dims dims_;
};

/// Unit-norm state vector on a tensor product of factors.
class PureState {
  public:
    PureState(Vector amplitudes, Dims dims);

    const Vector& amplitudes() const { return amp_; }
    const Dims& dims() const { return dims_; }
    std::size_t dim() const { return static_cast<std::size_t>(amp_.size()); }

    /// Builds |psi><psi| with the same factor layout.
    DensityMatrix density() const;

  private:
    Vector amp_;
    Dims dims_;
};

/// Kronecker product. Throws DimensionError if the result exceeds kMaxDim.
Matrix tensor(const Matrix& a, const Matrix& b);

/// Traces out every factor not listed in `keep`; kept factors stay in their
/// original order. `keep` must be a nonempty proper subset of the factors.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<std::size_t> keep);

struct Eigensystem {
    RealVector values;   // descending
    Matrix vectors;      // orthonormal columns, matching `values`
};

/// Eigendecomposition of a Hermitian matrix, eigenvalues in descending order.
Eigensystem eig_hermitian(const Matrix& m);

/// Eigenvalues only, descending.
RealVector eigenvalues_hermitian(const Matrix& m);

/// -x log2 x - (1-x) log2 (1-x), with 0 log 0 = 0.
double binary_entropy(double x);

/// Shannon entropy (bits) of a spectrum. Entries in [-1e-10, 0] count as 0;
/// anything more negative throws InvariantError.
double entropy_of_spectrum(const RealVector& spectrum);

/// von Neumann entropy in bits.
double von_neumann_entropy(const DensityMatrix& rho);

/// Independent standard complex Gaussian entries, normalized. `dim` must be 2 or 4.
/// Two-factor (2,2) layout for dim 4, single factor for dim 2.
PureState haar_random_pure_state(std::size_t dim, std::uint64_t seed);
PureState haar_random_pure_state(std::size_t dim, std::mt19937_64& rng);

/// Haar-distributed dim x dim unitary (QR of a Ginibre matrix, phases fixed).
Matrix haar_random_unitary(std::size_t dim, std::mt19937_64& rng);

/// Pauli matrices and small helpers.
Matrix identity(std::size_t dim);
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

} // namespace qnm
