#pragma once

// Correlation trajectories along a dynamical map and the two
// correlation-based non-Markovianity measures built from them.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qnm/channels.hpp"
#include "qnm/correlations.hpp"
#include "qnm/linalg.hpp"

namespace qnm {

/// Uniform grid t_k = t_start + (t_end - t_start) k / steps, k = 0..steps.
struct TimeGrid {
    double t_start = 0.0;
    double t_end = 1.0;
    std::size_t steps = 4000;

    void validate() const;
    double spacing() const { return (t_end - t_start) / static_cast<double>(steps); }
    double time(std::size_t k) const;
    std::size_t size() const { return steps + 1; }
    TimeGrid refined() const { return {t_start, t_end, 2 * steps}; }
};

enum class Functional { Eof, MutualInformation, Concurrence, AccessibleAE, InaccessibleAE, MutualInformationAE };

std::string_view to_string(Functional f);
/// Accepts eof, mi, concurrence, j_ae, delta_ae, i_ae.
std::optional<Functional> parse_functional(std::string_view name);

struct Trajectory {
    TimeGrid grid;
    std::vector<double> values;
};

/// (|00> + |11>)/sqrt(2).
PureState bell_phi_plus();

/// a|up,up> + b|up,down> + c|down,up> + d|down,down>, d = sqrt(1 - a^2 - b^2 - c^2).
/// "Up" is the excited level |1> of the channel basis (the level the damping
/// operator lowers), so the amplitudes land as d|00> + c|01> + b|10> + a|11>.
/// Throws DomainError if a^2 + b^2 + c^2 > 1.
PureState spin_state(double a, double b, double c);

struct SpinCoefficients {
    static constexpr double a = 0.05;
    static constexpr double b = 0.95;
    static constexpr double c = 0.17;
};

/// The witness state a=0.05, b=0.95, c=0.17.
PureState witness_state();

/// Evolved (S, A) state under one snapshot.
DensityMatrix evolve(const DynamicalMap& map, const PureState& psi0, double t);

double evaluate(Functional f, const DensityMatrix& rho_sa_t);

Trajectory trajectory(const DynamicalMap& map, const PureState& psi0, const TimeGrid& grid, Functional f);

/// Several functionals sampled in one pass; result order follows `fs`.
std::vector<Trajectory> trajectories(const DynamicalMap& map, const PureState& psi0, const TimeGrid& grid,
                                     std::span<const Functional> fs);

/// Increments with magnitude <= this are treated as zero.
inline constexpr double kRevivalThreshold = 1e-12;

/// Sum of the positive first differences.
double positive_variation(std::span<const double> values);
double positive_variation(const Trajectory& tr);

struct MeasureResult {
    double value = 0.0;
    PureState optimal_state;
    TimeGrid grid_used;
    bool converged = false;
};

struct RefinementPolicy {
    double tolerance = 1e-6;
    std::size_t max_steps = 64000;
};

/// Entanglement-based measure: positive variation of the EoF trajectory of
/// |Phi+>, refined by doubling the grid until it moves by < tolerance.
MeasureResult n_e(const DynamicalMap& map, const TimeGrid& grid, const RefinementPolicy& policy = {});

struct SearchOptions {
    std::size_t n_samples = 512;
    std::uint64_t seed = 42;
    std::size_t refine_iters = 100;
    std::size_t refine_pool = 5;
    double perturbation = 0.05;
};

struct Candidate {
    PureState state;
    double value;
};

/// Mutual-information-based measure: seeded random search over pure initial
/// states (Haar samples plus |Phi+> and the witness state), local Gaussian
/// refinement of the best few, then grid refinement on the winner.
MeasureResult n_i(const DynamicalMap& map, const TimeGrid& grid, const SearchOptions& search = {},
                  const RefinementPolicy& policy = {}, std::vector<Candidate>* evaluated = nullptr);

/// Positive variation of one functional for one fixed initial state, with grid refinement.
MeasureResult fixed_state_measure(const DynamicalMap& map, const PureState& psi0, const TimeGrid& grid,
                                  Functional f, const RefinementPolicy& policy = {});

struct FactorizationReport {
    double max_residual = 0.0;
    std::size_t states_checked = 0;
    std::size_t points_checked = 0;
};

/// max |C(evolved psi) - C(evolved Phi+) C(psi)| over `n_states` Haar states and the grid.
FactorizationReport check_factorization(const DynamicalMap& map, const TimeGrid& grid, std::size_t n_states,
                                        std::uint64_t seed);

/// Sign class of a grid interval for (dJ, d delta, dI) of the AE breakdown.
struct SignTriple {
    int dj = 0;
    int ddelta = 0;
    int di = 0;

    friend bool operator==(const SignTriple&, const SignTriple&) = default;
};

struct Region {
    SignTriple signs;
    std::size_t first_interval = 0; // interval k spans [t_k, t_{k+1}]
    std::size_t last_interval = 0;
    double t_begin = 0.0;
    double t_end = 0.0;
};

/// Merged runs of equal sign class, skipping the initial transient where
/// delta is still below `transient_floor`.
std::vector<Region> detect_regions(const Trajectory& j_ae, const Trajectory& delta_ae, const Trajectory& i_ae,
                                   double threshold = kRevivalThreshold, double transient_floor = 1e-9);

inline constexpr SignTriple kGreenRegion{+1, +1, +1};
inline constexpr SignTriple kBlueRegion{+1, -1, +1};
inline constexpr SignTriple kRedRegion{+1, -1, -1};

struct RegionPattern {
    Region green;
    Region blue;
    Region red;
};

/// First consecutive green, blue, red run in `regions`, if any.
std::optional<RegionPattern> find_three_region_pattern(std::span<const Region> regions);

std::string describe(const SignTriple& s);

} // namespace qnm
