#pragma once

// Single-qubit dynamical maps as time-indexed Kraus sets, the generalized
// amplitude damping channel with a decoherence cutoff, and the Stinespring
// purification of a channel acting on the S factor of an (S, A) pair.

#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "qnm/linalg.hpp"

namespace qnm {

inline constexpr std::size_t kSystemDim = 2;
inline constexpr std::size_t kEnvironmentDim = 4;
inline constexpr double kCompletenessTol = 1e-10;

/// Kraus operators acting on the open system S only. Completeness is not
/// enforced here (see validate_cptp); applying an incomplete set throws.
class KrausSet {
  public:
    explicit KrausSet(std::vector<Matrix> operators);

    const std::vector<Matrix>& operators() const { return ops_; }
    std::size_t size() const { return ops_.size(); }
    std::size_t sys_dim() const { return static_cast<std::size_t>(ops_.front().rows()); }

    static KrausSet identity();

  private:
    std::vector<Matrix> ops_;
};

/// ||sum_i K_i^dagger K_i - I||_max. Callers treat > kCompletenessTol as failure.
double validate_cptp(const KrausSet& ks);

/// Generalized amplitude damping with cutoff: mixing s(t') = cos^2(omega t'),
/// decay r(t') = exp(-t'), and t' = min(t, t_c).
struct GadParams {
    double omega = 5.0;
    double t_c = 0.25;

    void validate() const;
};

/// t - H(t - t_c)(t - t_c), i.e. min(t, t_c). Throws DomainError for t < 0.
double effective_time(double t, double t_c);

double gad_mixing(double t_eff, double omega);
double gad_decay(double t_eff);

KrausSet gad_kraus(double t, const GadParams& p);

/// Lambda(t, 0) as a family of Kraus snapshots.
class DynamicalMap {
  public:
    using Snapshot = std::function<KrausSet(double)>;

    explicit DynamicalMap(Snapshot snapshot) : snapshot_(std::move(snapshot)) {}

    KrausSet operator()(double t) const { return snapshot_(t); }

    static DynamicalMap identity();
    static DynamicalMap gad(GadParams p);

  private:
    Snapshot snapshot_;
};

/// sum_i (K_i x I) rho (K_i x I)^dagger for rho on (S, A) = (2, 2).
DensityMatrix apply_to_system(const KrausSet& ks, const DensityMatrix& rho_sa);

/// |Psi_SAE> = sum_i (K_i x I)|psi_SA> x |i>_E on factors (2, 2, 4); unused
/// environment levels stay empty.
PureState purify(const KrausSet& ks, const PureState& psi_sa);

/// Complete Kraus set with `n_ops` operators sliced from a random isometry.
KrausSet random_kraus_set(std::size_t n_ops, std::mt19937_64& rng);

} // namespace qnm
