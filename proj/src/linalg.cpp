#include "qnm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qnm/errors.hpp"

namespace qnm {

namespace {

std::size_t product(const Dims& dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

void require_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw DimensionError(std::string(what) + ": matrix must be square and nonempty");
    }
}

Vector complex_gaussian(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        v[i] = Complex(re, im);
    }
    return v;
}

} // namespace

double hermiticity_defect(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

DensityMatrix::DensityMatrix(Matrix mat, Dims dims) : mat_(std::move(mat)), dims_(std::move(dims)) {
    require_square(mat_, "DensityMatrix");
    if (dims_.empty() || product(dims_) != dim()) {
        throw DimensionError("DensityMatrix: factor dimensions do not multiply to " + std::to_string(dim()));
    }
    if (dim() > kMaxDim) {
        throw DimensionError("DensityMatrix: dimension exceeds " + std::to_string(kMaxDim));
    }
    if (hermiticity_defect(mat_) > tol::kHermitian) {
        throw InvariantError("DensityMatrix: not Hermitian");
    }
    const double tr = mat_.trace().real();
    if (std::abs(tr - 1.0) > tol::kTrace) {
        throw InvariantError("DensityMatrix: trace " + std::to_string(tr) + " != 1");
    }
    // Exact Hermitian symmetrization removes the O(eps) skew part left by products.
    mat_ = 0.5 * (mat_ + mat_.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol::kPositivity) {
        throw InvariantError("DensityMatrix: negative eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
    }
}

double DensityMatrix::purity() const {
    return (mat_ * mat_).trace().real();
}

PureState::PureState(Vector amplitudes, Dims dims) : amp_(std::move(amplitudes)), dims_(std::move(dims)) {
    if (amp_.size() == 0 || dims_.empty() || product(dims_) != dim()) {
        throw DimensionError("PureState: factor dimensions do not match amplitude count");
    }
    if (std::abs(amp_.norm() - 1.0) > tol::kNorm) {
        throw InvariantError("PureState: amplitudes are not unit norm");
    }
}

DensityMatrix PureState::density() const {
    return DensityMatrix(amp_ * amp_.adjoint(), dims_);
}

Matrix tensor(const Matrix& a, const Matrix& b) {
    const Eigen::Index rows = a.rows() * b.rows();
    const Eigen::Index cols = a.cols() * b.cols();
    if (static_cast<std::size_t>(std::max(rows, cols)) > kMaxDim) {
        throw DimensionError("tensor: product dimension exceeds " + std::to_string(kMaxDim));
    }
    Matrix out(rows, cols);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
    const Dims& dims = rho.dims();
    const std::size_t n = dims.size();
    std::vector<bool> kept(n, false);
    for (std::size_t k : keep) {
        if (k >= n || kept[k]) throw DimensionError("partial_trace: invalid factor index");
        kept[k] = true;
    }
    if (keep.empty() || keep.size() == n) {
        throw DimensionError("partial_trace: keep must be a nonempty proper subset");
    }

    Dims kept_dims;
    Dims traced_dims;
    for (std::size_t f = 0; f < n; ++f) (kept[f] ? kept_dims : traced_dims).push_back(dims[f]);
    const std::size_t dk = product(kept_dims);
    const std::size_t dt = product(traced_dims);

    // Row-major strides of the full index.
    std::vector<std::size_t> stride(n, 1);
    for (std::size_t f = n - 1; f > 0; --f) stride[f - 1] = stride[f] * dims[f];

    // Full index from (kept multi-index, traced multi-index), both row-major.
    auto full_index = [&](std::size_t k_idx, std::size_t t_idx) {
        std::size_t out = 0;
        for (std::size_t f = n; f-- > 0;) {
            if (kept[f]) {
                out += (k_idx % dims[f]) * stride[f];
                k_idx /= dims[f];
            } else {
                out += (t_idx % dims[f]) * stride[f];
                t_idx /= dims[f];
            }
        }
        return out;
    };

    const Matrix& m = rho.matrix();
    Matrix red = Matrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
    for (std::size_t i = 0; i < dk; ++i) {
        for (std::size_t j = 0; j < dk; ++j) {
            Complex acc{0.0, 0.0};
            for (std::size_t t = 0; t < dt; ++t) {
                acc += m(static_cast<Eigen::Index>(full_index(i, t)), static_cast<Eigen::Index>(full_index(j, t)));
            }
            red(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc;
        }
    }
    return DensityMatrix(std::move(red), std::move(kept_dims));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<std::size_t> keep) {
    return partial_trace(rho, std::span<const std::size_t>(keep.begin(), keep.size()));
}

Eigensystem eig_hermitian(const Matrix& m) {
    require_square(m, "eig_hermitian");
    if (hermiticity_defect(m) > tol::kEigInput) {
        throw InvariantError("eig_hermitian: input is not Hermitian");
    }
    const Matrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    if (es.info() != Eigen::Success) {
        throw InvariantError("eig_hermitian: solver did not converge");
    }
    // Eigen returns ascending order.
    const Eigen::Index n = sym.rows();
    Eigensystem out{RealVector(n), Matrix(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values[i] = es.eigenvalues()[n - 1 - i];
        out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
    }
    return out;
}

double binary_entropy(double x) {
    auto term = [](double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; };
    return term(x) + term(1.0 - x);
}

double entropy_of_spectrum(const RealVector& spectrum) {
    double h = 0.0;
    for (double p : spectrum) {
        if (p < -tol::kPositivity) {
            throw InvariantError("entropy: eigenvalue " + std::to_string(p) + " below clipping threshold");
        }
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

RealVector eigenvalues_hermitian(const Matrix& m) {
    require_square(m, "eigenvalues_hermitian");
    if (hermiticity_defect(m) > tol::kEigInput) {
        throw InvariantError("eigenvalues_hermitian: input is not Hermitian");
    }
    const Matrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().reverse();
}

double von_neumann_entropy(const DensityMatrix& rho) {
    if (rho.dim() == 2) {
        // Closed form for a qubit: eigenvalues (1 +- |r|)/2 with |r| the Bloch length.
        const Matrix& m = rho.matrix();
        const double z = m(0, 0).real() - m(1, 1).real();
        const double r = std::min(1.0, std::sqrt(z * z + 4.0 * std::norm(m(0, 1))));
        return binary_entropy(0.5 * (1.0 + r));
    }
    return entropy_of_spectrum(eigenvalues_hermitian(rho.matrix()));
}

PureState haar_random_pure_state(std::size_t dim, std::mt19937_64& rng) {
    if (dim != 2 && dim != 4) throw DimensionError("haar_random_pure_state: dim must be 2 or 4");
    Vector v = complex_gaussian(dim, rng);
    v /= v.norm();
    return PureState(std::move(v), dim == 4 ? Dims{2, 2} : Dims{2});
}

PureState haar_random_pure_state(std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return haar_random_pure_state(dim, rng);
}

Matrix haar_random_unitary(std::size_t dim, std::mt19937_64& rng) {
    Matrix z(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (Eigen::Index c = 0; c < z.cols(); ++c) z.col(c) = complex_gaussian(dim, rng);
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ() * Matrix::Identity(z.rows(), z.cols());
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the phase ambiguity so the distribution is Haar.
    for (Eigen::Index i = 0; i < q.cols(); ++i) {
        const double mag = std::abs(r(i, i));
        if (mag > 0.0) q.col(i) *= r(i, i) / mag;
    }
    return q;
}

Matrix identity(std::size_t dim) {
    return Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

Matrix pauli_y() {
    Matrix m(2, 2);
    m << Complex(0.0, 0.0), Complex(0.0, -1.0), Complex(0.0, 1.0), Complex(0.0, 0.0);
    return m;
}

Matrix pauli_z() {
    Matrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

} // namespace qnm
