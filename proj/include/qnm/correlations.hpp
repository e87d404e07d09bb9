#pragma once

// Correlation functionals of the (S, A) pair and of the ancilla-environment
// pair (A, E) reached through the purification of the dynamics.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qnm/linalg.hpp"

namespace qnm {

/// Wootters concurrence of a two-qubit state, in [0, 1].
double concurrence(const DensityMatrix& rho_sa);

/// Pure-state shortcut 2|a d - b c|.
double concurrence(const PureState& psi_sa);

/// Entanglement of formation (bits) as a function of concurrence.
double eof_from_concurrence(double c);

double eof(const DensityMatrix& rho_sa);

/// S(rho_S) + S(rho_A) - S(rho_SA), bits.
double mutual_information_sa(const DensityMatrix& rho_sa);

/// Total, accessible and inaccessible information shared by the ancilla and
/// the environment (environment measured), in bits.
struct InfoBreakdown {
    double i_ae = 0.0;
    double j_ae = 0.0;
    double delta_ae = 0.0;
};

/// Evaluates the breakdown from the evolved (S, A) state alone, assuming the
/// joint SAE state is pure:
///   I_AE = S(A) + S(SA) - S(S),  J_AE = S(A) - EoF(SA),  delta_AE = I_AE - J_AE.
/// Throws InvariantError if S(A) - EoF(SA) < -1e-8.
InfoBreakdown info_breakdown_ae(const DensityMatrix& rho_sa_t);

struct MeasurementOutcome {
    double probability = 0.0;
    DensityMatrix conditional_state;
};

/// Outcomes of measuring E in the orthonormal basis given by the columns of
/// `basis` on a state with layout (A, E) = (2, 4). Zero-probability outcomes
/// are dropped.
std::vector<MeasurementOutcome> measure_environment(const DensityMatrix& rho_ae, const Matrix& basis);

/// Best S(A) - sum_i p_i S(A|i) over `n_samples` Haar-random rank-1
/// projective measurements on E. A lower bound on the accessible information.
double measurement_oracle(const DensityMatrix& rho_ae, std::size_t n_samples, std::uint64_t seed);

} // namespace qnm
