#include "qnm/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "qnm/errors.hpp"

namespace qnm {

namespace {

void require_two_qubits(const Dims& dims, const char* what) {
    if (dims != Dims{2, 2}) throw DimensionError(std::string(what) + ": expected a two-qubit (2, 2) state");
}

const Matrix& spin_flip() {
    static const Matrix yy = tensor(pauli_y(), pauli_y());
    return yy;
}

constexpr double kKoashiWinterSlack = 1e-8;

} // namespace

double concurrence(const DensityMatrix& rho_sa) {
    require_two_qubits(rho_sa.dims(), "concurrence");

    // rho = W W^dagger with W = V sqrt(Lambda). The Wootters lambdas are the
    // singular values of the symmetric matrix W^T (Y x Y) W, which equal the
    // square roots of the spectrum of rho (Y x Y) rho^* (Y x Y).
    const Eigensystem es = eig_hermitian(rho_sa.matrix());
    Matrix w = es.vectors;
    for (Eigen::Index k = 0; k < w.cols(); ++k) w.col(k) *= std::sqrt(std::max(0.0, es.values[k]));
    const Matrix tau = w.transpose() * spin_flip() * w;
    Eigen::JacobiSVD<Matrix> svd(tau);
    const RealVector& lam = svd.singularValues(); // descending
    const double c = lam[0] - lam[1] - lam[2] - lam[3];
    return std::clamp(c, 0.0, 1.0);
}

double concurrence(const PureState& psi_sa) {
    require_two_qubits(psi_sa.dims(), "concurrence");
    const Vector& v = psi_sa.amplitudes();
    return std::min(1.0, 2.0 * std::abs(v[0] * v[3] - v[1] * v[2]));
}

double eof_from_concurrence(double c) {
    if (c < 0.0 || c > 1.0 + 1e-12) throw DomainError("eof_from_concurrence: concurrence outside [0, 1]");
    const double cc = std::min(c, 1.0);
    return binary_entropy(0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - cc * cc))));
}

double eof(const DensityMatrix& rho_sa) {
    return eof_from_concurrence(concurrence(rho_sa));
}

double mutual_information_sa(const DensityMatrix& rho_sa) {
    require_two_qubits(rho_sa.dims(), "mutual_information_sa");
    const double s_s = von_neumann_entropy(partial_trace(rho_sa, {0}));
    const double s_a = von_neumann_entropy(partial_trace(rho_sa, {1}));
    const double s_sa = von_neumann_entropy(rho_sa);
    return s_s + s_a - s_sa;
}

InfoBreakdown info_breakdown_ae(const DensityMatrix& rho_sa_t) {
    require_two_qubits(rho_sa_t.dims(), "info_breakdown_ae");
    const double s_s = von_neumann_entropy(partial_trace(rho_sa_t, {0}));
    const double s_a = von_neumann_entropy(partial_trace(rho_sa_t, {1}));
    const double s_sa = von_neumann_entropy(rho_sa_t);

    // Purity of SAE: S(E) = S(SA), S(AE) = S(S).
    const double i_raw = s_a + s_sa - s_s;
    const double j_raw = s_a - eof(rho_sa_t);
    if (j_raw < -kKoashiWinterSlack) {
        throw InvariantError("info_breakdown_ae: S(A) - EoF = " + std::to_string(j_raw) +
                             " < 0; the SAE state cannot be pure");
    }
    if (i_raw < -kKoashiWinterSlack) {
        throw InvariantError("info_breakdown_ae: negative ancilla-environment mutual information");
    }

    InfoBreakdown out;
    out.i_ae = std::max(0.0, i_raw);
    out.j_ae = std::max(0.0, j_raw);
    const double delta = out.i_ae - out.j_ae;
    if (delta < -kKoashiWinterSlack) {
        throw InvariantError("info_breakdown_ae: accessible information exceeds mutual information");
    }
    out.delta_ae = std::max(0.0, delta);
    return out;
}

std::vector<MeasurementOutcome> measure_environment(const DensityMatrix& rho_ae, const Matrix& basis) {
    if (rho_ae.dims() != Dims{2, 4}) throw DimensionError("measure_environment: expected (A, E) layout (2, 4)");
    if (basis.rows() != 4 || basis.cols() != 4) throw DimensionError("measure_environment: basis must be 4x4");

    const Matrix& m = rho_ae.matrix();
    std::vector<MeasurementOutcome> out;
    for (Eigen::Index i = 0; i < 4; ++i) {
        const Vector e = basis.col(i);
        // (I_A x <e|) rho (I_A x |e>)
        Matrix cond(2, 2);
        for (Eigen::Index a = 0; a < 2; ++a) {
            for (Eigen::Index b = 0; b < 2; ++b) {
                cond(a, b) = (e.adjoint() * m.block(a * 4, b * 4, 4, 4) * e).value();
            }
        }
        const double p = cond.trace().real();
        if (p <= 1e-12) continue;
        out.push_back({p, DensityMatrix(cond / p, Dims{2})});
    }
    return out;
}

double measurement_oracle(const DensityMatrix& rho_ae, std::size_t n_samples, std::uint64_t seed) {
    if (rho_ae.dims() != Dims{2, 4}) throw DimensionError("measurement_oracle: expected (A, E) layout (2, 4)");
    if (n_samples == 0) throw DomainError("measurement_oracle: n_samples must be >= 1");

    const double s_a = von_neumann_entropy(partial_trace(rho_ae, {0}));
    std::mt19937_64 rng(seed);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n_samples; ++k) {
        const Matrix basis = haar_random_unitary(4, rng);
        double conditional = 0.0;
        for (const MeasurementOutcome& o : measure_environment(rho_ae, basis)) {
            conditional += o.probability * von_neumann_entropy(o.conditional_state);
        }
        best = std::max(best, s_a - conditional);
    }
    return best;
}

} // namespace qnm
