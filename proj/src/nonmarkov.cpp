#include "qnm/nonmarkov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "qnm/errors.hpp"

namespace qnm {

namespace {

std::vector<KrausSet> snapshots(const DynamicalMap& map, const TimeGrid& grid) {
    std::vector<KrausSet> out;
    out.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) out.push_back(map(grid.time(k)));
    return out;
}

std::vector<double> sample(std::span<const KrausSet> snaps, const PureState& psi0, Functional f) {
    const DensityMatrix rho0 = psi0.density();
    std::vector<double> values;
    values.reserve(snaps.size());
    for (const KrausSet& ks : snaps) values.push_back(evaluate(f, apply_to_system(ks, rho0)));
    return values;
}

// Unchecked fixed-size evaluation of the mutual-information positive variation,
// used only to rank search candidates. Reported values go through the checked path.
class MutualInformationScorer {
  public:
    MutualInformationScorer(const DynamicalMap& map, const TimeGrid& grid) {
        const Matrix id = qnm::identity(2);
        lifted_.reserve(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const KrausSet ks = map(grid.time(k));
            if (validate_cptp(ks) > kCompletenessTol) throw InvariantError("n_i: map is not trace preserving");
            std::vector<Eigen::Matrix4cd> ops;
            for (const Matrix& op : ks.operators()) ops.emplace_back(tensor(op, id));
            lifted_.push_back(std::move(ops));
        }
    }

    double operator()(const PureState& psi) const {
        const Eigen::Vector4cd v = psi.amplitudes();
        const Eigen::Matrix4cd rho0 = v * v.adjoint();
        double total = 0.0;
        double previous = 0.0;
        for (std::size_t k = 0; k < lifted_.size(); ++k) {
            Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
            for (const auto& op : lifted_[k]) rho.noalias() += op * rho0 * op.adjoint();
            const double mi = mutual_information(rho);
            if (k > 0 && mi - previous > kRevivalThreshold) total += mi - previous;
            previous = mi;
        }
        return total;
    }

  private:
    static double qubit_entropy(Complex a, Complex d, Complex b) {
        const double z = a.real() - d.real();
        const double r = std::min(1.0, std::sqrt(z * z + 4.0 * std::norm(b)));
        return binary_entropy(0.5 * (1.0 + r));
    }

    static double mutual_information(const Eigen::Matrix4cd& rho) {
        // Index = 2 s + a.
        const double s_s = qubit_entropy(rho(0, 0) + rho(1, 1), rho(2, 2) + rho(3, 3), rho(0, 2) + rho(1, 3));
        const double s_a = qubit_entropy(rho(0, 0) + rho(2, 2), rho(1, 1) + rho(3, 3), rho(0, 1) + rho(2, 3));
        const Eigen::Matrix4cd sym = 0.5 * (rho + rho.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(sym, Eigen::EigenvaluesOnly);
        double s_sa = 0.0;
        for (double p : es.eigenvalues()) {
            if (p > 0.0) s_sa -= p * std::log2(p);
        }
        return s_s + s_a - s_sa;
    }

    std::vector<std::vector<Eigen::Matrix4cd>> lifted_;
};

int sign_of(double dx, double threshold) {
    if (dx > threshold) return 1;
    if (dx < -threshold) return -1;
    return 0;
}

PureState perturb(const PureState& psi, double sigma, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, sigma);
    Vector v = psi.amplitudes();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        v[i] += Complex(re, im);
    }
    v /= v.norm();
    return PureState(std::move(v), psi.dims());
}

template <typename Measure>
MeasureResult refine_until_converged(const TimeGrid& grid, const RefinementPolicy& policy, const PureState& state,
                                     Measure&& measure) {
    TimeGrid current = grid;
    double value = measure(current);
    bool converged = false;
    while (current.steps * 2 <= policy.max_steps) {
        const TimeGrid finer = current.refined();
        const double next = measure(finer);
        const double change = std::abs(next - value);
        current = finer;
        value = next;
        if (change < policy.tolerance) {
            converged = true;
            break;
        }
    }
    return MeasureResult{value, state, current, converged};
}

} // namespace

void TimeGrid::validate() const {
    if (!(t_start >= 0.0)) throw DomainError("TimeGrid: t_start must be >= 0");
    if (!(t_end > t_start)) throw DomainError("TimeGrid: t_end must exceed t_start");
    if (steps < 2) throw DomainError("TimeGrid: need at least 2 steps");
}

double TimeGrid::time(std::size_t k) const {
    if (k == steps) return t_end;
    return t_start + (t_end - t_start) * static_cast<double>(k) / static_cast<double>(steps);
}

std::string_view to_string(Functional f) {
    switch (f) {
    case Functional::Eof: return "eof";
    case Functional::MutualInformation: return "mi";
    case Functional::Concurrence: return "concurrence";
    case Functional::AccessibleAE: return "j_ae";
    case Functional::InaccessibleAE: return "delta_ae";
    case Functional::MutualInformationAE: return "i_ae";
    }
    return "?";
}

std::optional<Functional> parse_functional(std::string_view name) {
    for (Functional f : {Functional::Eof, Functional::MutualInformation, Functional::Concurrence,
                         Functional::AccessibleAE, Functional::InaccessibleAE, Functional::MutualInformationAE}) {
        if (to_string(f) == name) return f;
    }
    return std::nullopt;
}

PureState bell_phi_plus() {
    Vector v = Vector::Zero(4);
    v[0] = v[3] = 1.0 / std::sqrt(2.0);
    return PureState(std::move(v), Dims{2, 2});
}

PureState spin_state(double a, double b, double c) {
    const double rest = 1.0 - a * a - b * b - c * c;
    if (rest < -1e-12) throw DomainError("spin_state: a^2 + b^2 + c^2 exceeds 1");
    const double d = std::sqrt(std::max(0.0, rest));
    Vector v(4);
    v << d, c, b, a;
    v /= v.norm();
    return PureState(std::move(v), Dims{2, 2});
}

PureState witness_state() {
    return spin_state(SpinCoefficients::a, SpinCoefficients::b, SpinCoefficients::c);
}

DensityMatrix evolve(const DynamicalMap& map, const PureState& psi0, double t) {
    return apply_to_system(map(t), psi0.density());
}

double evaluate(Functional f, const DensityMatrix& rho_sa_t) {
    switch (f) {
    case Functional::Eof: return eof(rho_sa_t);
    case Functional::MutualInformation: return mutual_information_sa(rho_sa_t);
    case Functional::Concurrence: return concurrence(rho_sa_t);
    case Functional::AccessibleAE: return info_breakdown_ae(rho_sa_t).j_ae;
    case Functional::InaccessibleAE: return info_breakdown_ae(rho_sa_t).delta_ae;
    case Functional::MutualInformationAE: return info_breakdown_ae(rho_sa_t).i_ae;
    }
    throw DomainError("evaluate: unsupported functional");
}

Trajectory trajectory(const DynamicalMap& map, const PureState& psi0, const TimeGrid& grid, Functional f) {
    const Functional fs[] = {f};
    return std::move(trajectories(map, psi0, grid, fs).front());
}

std::vector<Trajectory> trajectories(const DynamicalMap& map, const PureState& psi0, const TimeGrid& grid,
                                     std::span<const Functional> fs) {
    grid.validate();
    if (psi0.dims() != Dims{2, 2}) throw DimensionError("trajectory: initial state must live on (S, A) = (2, 2)");

    std::vector<Trajectory> out(fs.size(), Trajectory{grid, {}});
    for (auto& tr : out) tr.values.reserve(grid.size());

    const DensityMatrix rho0 = psi0.density();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const DensityMatrix rho = apply_to_system(map(grid.time(k)), rho0);
        std::optional<InfoBreakdown> info;
        for (std::size_t i = 0; i < fs.size(); ++i) {
            double v = 0.0;
            switch (fs[i]) {
            case Functional::AccessibleAE:
            case Functional::InaccessibleAE:
            case Functional::MutualInformationAE:
                if (!info) info = info_breakdown_ae(rho);
                v = fs[i] == Functional::AccessibleAE     ? info->j_ae
                    : fs[i] == Functional::InaccessibleAE ? info->delta_ae
                                                          : info->i_ae;
                break;
            default: v = evaluate(fs[i], rho);
            }
            out[i].values.push_back(v);
        }
    }
    return out;
}

double positive_variation(std::span<const double> values) {
    double total = 0.0;
    for (std::size_t k = 1; k < values.size(); ++k) {
        const double inc = values[k] - values[k - 1];
        if (inc > kRevivalThreshold) total += inc;
    }
    return total;
}

double positive_variation(const Trajectory& tr) {
    return positive_variation(std::span<const double>(tr.values));
}

MeasureResult fixed_state_measure(const DynamicalMap& map, const PureState& psi0, const TimeGrid& grid,
                                  Functional f, const RefinementPolicy& policy) {
    grid.validate();
    return refine_until_converged(grid, policy, psi0, [&](const TimeGrid& g) {
        return positive_variation(trajectory(map, psi0, g, f));
    });
}

MeasureResult n_e(const DynamicalMap& map, const TimeGrid& grid, const RefinementPolicy& policy) {
    return fixed_state_measure(map, bell_phi_plus(), grid, Functional::Eof, policy);
}

MeasureResult n_i(const DynamicalMap& map, const TimeGrid& grid, const SearchOptions& search,
                  const RefinementPolicy& policy, std::vector<Candidate>* evaluated) {
    grid.validate();
    if (search.n_samples == 0) throw DomainError("n_i: n_samples must be >= 1");

    const MutualInformationScorer score(map, grid);

    std::vector<Candidate> pool;
    pool.reserve(search.n_samples + 2);
    pool.push_back({bell_phi_plus(), 0.0});
    pool.push_back({witness_state(), 0.0});
    std::mt19937_64 rng(search.seed);
    for (std::size_t i = 0; i < search.n_samples; ++i) pool.push_back({haar_random_pure_state(4, rng), 0.0});
    for (Candidate& c : pool) c.value = score(c.state);
    if (evaluated) *evaluated = pool;

    // Stable sort keeps the index order among ties, so the result is seed-deterministic.
    std::stable_sort(pool.begin(), pool.end(), [](const Candidate& x, const Candidate& y) { return x.value > y.value; });
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(std::min(pool.size(), std::max<std::size_t>(1, search.refine_pool))),
               pool.end());

    for (std::size_t iter = 0; iter < search.refine_iters; ++iter) {
        for (Candidate& c : pool) {
            PureState trial = perturb(c.state, search.perturbation, rng);
            const double v = score(trial);
            if (v > c.value) c = {std::move(trial), v};
        }
    }

    const auto best = std::max_element(pool.begin(), pool.end(),
                                       [](const Candidate& x, const Candidate& y) { return x.value < y.value; });
    return fixed_state_measure(map, best->state, grid, Functional::MutualInformation, policy);
}

FactorizationReport check_factorization(const DynamicalMap& map, const TimeGrid& grid, std::size_t n_states,
                                        std::uint64_t seed) {
    grid.validate();
    if (n_states == 0) throw DomainError("check_factorization: n_states must be >= 1");

    const std::vector<KrausSet> snaps = snapshots(map, grid);
    const std::vector<double> bell = sample(snaps, bell_phi_plus(), Functional::Concurrence);

    FactorizationReport report;
    std::mt19937_64 rng(seed);
    for (std::size_t n = 0; n < n_states; ++n) {
        const PureState psi = haar_random_pure_state(4, rng);
        const double c0 = concurrence(psi.density());
        const std::vector<double> c = sample(snaps, psi, Functional::Concurrence);
        for (std::size_t k = 0; k < c.size(); ++k) {
            report.max_residual = std::max(report.max_residual, std::abs(c[k] - bell[k] * c0));
        }
        ++report.states_checked;
    }
    report.points_checked = grid.size();
    return report;
}

std::vector<Region> detect_regions(const Trajectory& j_ae, const Trajectory& delta_ae, const Trajectory& i_ae,
                                   double threshold, double transient_floor) {
    const std::size_t n = j_ae.values.size();
    if (n < 2 || delta_ae.values.size() != n || i_ae.values.size() != n) {
        throw DimensionError("detect_regions: trajectories must share a grid of at least two points");
    }
    const TimeGrid& grid = j_ae.grid;

    std::size_t start = 0;
    while (start + 1 < n && delta_ae.values[start + 1] < transient_floor) ++start;

    std::vector<Region> regions;
    for (std::size_t k = start; k + 1 < n; ++k) {
        const SignTriple s{sign_of(j_ae.values[k + 1] - j_ae.values[k], threshold),
                           sign_of(delta_ae.values[k + 1] - delta_ae.values[k], threshold),
                           sign_of(i_ae.values[k + 1] - i_ae.values[k], threshold)};
        if (!regions.empty() && regions.back().signs == s) {
            regions.back().last_interval = k;
            regions.back().t_end = grid.time(k + 1);
        } else {
            regions.push_back({s, k, k, grid.time(k), grid.time(k + 1)});
        }
    }
    return regions;
}

std::optional<RegionPattern> find_three_region_pattern(std::span<const Region> regions) {
    for (std::size_t i = 0; i + 2 < regions.size(); ++i) {
        if (regions[i].signs == kGreenRegion && regions[i + 1].signs == kBlueRegion &&
            regions[i + 2].signs == kRedRegion) {
            return RegionPattern{regions[i], regions[i + 1], regions[i + 2]};
        }
    }
    return std::nullopt;
}

std::string describe(const SignTriple& s) {
    auto sym = [](int v) { return v > 0 ? std::string(">0") : v < 0 ? std::string("<0") : std::string("=0"); };
    return "dJ" + sym(s.dj) + ",ddelta" + sym(s.ddelta) + ",dI" + sym(s.di);
}

} // namespace qnm
