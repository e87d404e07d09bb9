#include "qnm/nonmarkov.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gtest/gtest.h"

#include "oracles.hpp"
#include "qnm/errors.hpp"

using namespace qnm;

namespace {

const GadParams kGad{5.0, 0.25};
const TimeGrid kGrid{0.0, 1.0, 4000};

// Phase-flip channel with strength 0.25 sin^2(pi t): Bell concurrence |1 - 2p|
// dips to 1/2 at t = 1/2 and is fully restored at t = 1.
DynamicalMap dip_and_recover() {
    return DynamicalMap([](double t) {
        const double p = 0.25 * std::pow(std::sin(M_PI * t), 2);
        return KrausSet({std::sqrt(1 - p) * identity(2), std::sqrt(p) * pauli_z()});
    });
}

std::vector<double> bell_eof_oracle(const TimeGrid& g) {
    std::vector<double> out;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const long double c = oracle::bell_concurrence_gad(g.time(k), kGad.omega, kGad.t_c);
        out.push_back(static_cast<double>(oracle::binary_entropy(0.5L * (1.0L + std::sqrt(1.0L - c * c)))));
    }
    return out;
}

} // namespace

TEST(time_grid, endpoints_and_validation) {
    EXPECT_EQ(kGrid.time(0), 0.0);
    EXPECT_EQ(kGrid.time(1000), 0.25);
    EXPECT_EQ(kGrid.time(4000), 1.0);
    EXPECT_EQ(kGrid.size(), 4001u);
    EXPECT_THROW((TimeGrid{0.0, 1.0, 1}.validate()), DomainError);
    EXPECT_THROW((TimeGrid{0.5, 0.5, 10}.validate()), DomainError);
    EXPECT_THROW((TimeGrid{-0.1, 1.0, 10}.validate()), DomainError);
}

TEST(functional, names_round_trip) {
    for (const char* name : {"eof", "mi", "concurrence", "j_ae", "delta_ae", "i_ae"}) {
        const auto f = parse_functional(name);
        ASSERT_TRUE(f.has_value()) << name;
        EXPECT_EQ(to_string(*f), name);
    }
    EXPECT_FALSE(parse_functional("discord").has_value());
}

TEST(spin_state, amplitude_placement) {
    const PureState psi = spin_state(0.05, 0.95, 0.17);
    const Vector& v = psi.amplitudes();
    EXPECT_DOUBLE_EQ(v[3].real(), 0.05); // up,up = |11>
    EXPECT_DOUBLE_EQ(v[2].real(), 0.95); // up,down = |10>
    EXPECT_DOUBLE_EQ(v[1].real(), 0.17); // down,up = |01>
    EXPECT_NEAR(v[0].real(), std::sqrt(1 - 0.05 * 0.05 - 0.95 * 0.95 - 0.17 * 0.17), 1e-15);
    EXPECT_THROW(spin_state(0.9, 0.9, 0.0), DomainError);
    EXPECT_NEAR(concurrence(psi), 0.297290079735635, 1e-14);
    EXPECT_NEAR(eof(psi.density()), 0.155834684214058, 1e-12);
}

TEST(trajectory, identity_map_is_constant) {
    const TimeGrid g{0.0, 1.0, 20};
    for (Functional f : {Functional::Eof, Functional::MutualInformation, Functional::Concurrence,
                         Functional::AccessibleAE, Functional::InaccessibleAE, Functional::MutualInformationAE}) {
        const Trajectory tr = trajectory(DynamicalMap::identity(), witness_state(), g, f);
        ASSERT_EQ(tr.values.size(), 21u);
        for (double v : tr.values) EXPECT_EQ(v, tr.values.front()) << to_string(f);
    }
}

TEST(trajectory, bell_eof_matches_closed_form) {
    const Trajectory tr = trajectory(DynamicalMap::gad(kGad), bell_phi_plus(), kGrid, Functional::Eof);
    EXPECT_NEAR(tr.values.front(), 1.0, 1e-12);
    const std::vector<double> expected = bell_eof_oracle(kGrid);
    for (std::size_t k = 0; k < tr.values.size(); ++k) ASSERT_NEAR(tr.values[k], expected[k], 1e-10) << k;
}

TEST(trajectory, bell_eof_shape) {
    // Decreasing until the concurrence derivative changes sign near t = 0.2345,
    // rising slightly until the cutoff, then frozen.
    const Trajectory tr = trajectory(DynamicalMap::gad(kGad), bell_phi_plus(), kGrid, Functional::Eof);
    const auto min_it = std::min_element(tr.values.begin(), tr.values.begin() + 1001);
    const std::size_t k_min = static_cast<std::size_t>(min_it - tr.values.begin());
    EXPECT_NEAR(kGrid.time(k_min), 0.2345, 0.0005);
    for (std::size_t k = 1; k <= k_min; ++k) ASSERT_LE(tr.values[k] - tr.values[k - 1], 1e-12) << k;
    for (std::size_t k = k_min + 1; k <= 1000; ++k) ASSERT_GT(tr.values[k] - tr.values[k - 1], 0.0) << k;
}

TEST(trajectory, post_cutoff_flatness) {
    const DynamicalMap map = DynamicalMap::gad(kGad);
    for (const PureState& psi : {bell_phi_plus(), witness_state()}) {
        const Functional fs[] = {Functional::Eof, Functional::MutualInformation, Functional::AccessibleAE,
                                 Functional::InaccessibleAE, Functional::MutualInformationAE};
        for (const Trajectory& tr : trajectories(map, psi, kGrid, fs)) {
            for (std::size_t k = 1001; k < tr.values.size(); ++k) {
                ASSERT_LE(std::abs(tr.values[k] - tr.values[k - 1]), 1e-12);
            }
        }
    }
}

TEST(trajectory, witness_mutual_information_revives_before_cutoff) {
    const Trajectory tr =
        trajectory(DynamicalMap::gad(kGad), witness_state(), kGrid, Functional::MutualInformation);
    bool revival = false;
    for (std::size_t k = 1; k <= 1000; ++k) revival |= tr.values[k] - tr.values[k - 1] > 1e-6;
    EXPECT_TRUE(revival);
    for (std::size_t k = 1001; k < tr.values.size(); ++k) ASSERT_EQ(tr.values[k], tr.values[1000]);
}

TEST(trajectory, conservation_of_total_correlations) {
    // I_SA + I_AE = 2 S(A) with S(A) frozen by the local dynamics.
    const DynamicalMap map = DynamicalMap::gad(kGad);
    const TimeGrid g{0.0, 1.0, 400};
    for (const PureState& psi : {bell_phi_plus(), witness_state()}) {
        const double s_a0 = von_neumann_entropy(partial_trace(psi.density(), {1}));
        const Functional fs[] = {Functional::MutualInformation, Functional::MutualInformationAE};
        const auto tr = trajectories(map, psi, g, fs);
        for (std::size_t k = 0; k < g.size(); ++k) ASSERT_NEAR(tr[0].values[k] + tr[1].values[k], 2 * s_a0, 1e-9);
    }
}

TEST(trajectory, koashi_winter_increments) {
    const DynamicalMap map = DynamicalMap::gad(kGad);
    const TimeGrid g{0.0, 0.3, 300};
    const Functional fs[] = {Functional::Eof, Functional::AccessibleAE};
    const auto tr = trajectories(map, witness_state(), g, fs);
    for (std::size_t k = 1; k < g.size(); ++k) {
        ASSERT_NEAR(tr[0].values[k] - tr[0].values[k - 1], -(tr[1].values[k] - tr[1].values[k - 1]), 1e-10);
    }
}

TEST(positive_variation, reference_lists) {
    EXPECT_DOUBLE_EQ(positive_variation(std::vector<double>{1, 2, 1, 3}), 3.0);
    EXPECT_EQ(positive_variation(std::vector<double>{5, 4, 3, 1}), 0.0);
    EXPECT_EQ(positive_variation(std::vector<double>{2, 2, 2}), 0.0);
    EXPECT_EQ(positive_variation(std::vector<double>{1.0, 1.0 + 5e-13}), 0.0);
}

TEST(n_e, identity_is_zero) {
    const MeasureResult r = n_e(DynamicalMap::identity(), kGrid);
    EXPECT_EQ(r.value, 0.0);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.optimal_state.amplitudes(), bell_phi_plus().amplitudes());
}

TEST(n_e, dip_and_recover_map) {
    const MeasureResult r = n_e(dip_and_recover(), TimeGrid{0.0, 1.0, 400});
    // 1 - EoF(C = 1/2) = 1 - h((1 + sqrt(3)/2)/2)
    EXPECT_NEAR(r.value, 1.0 - 0.354578902665270, 1e-9);
    EXPECT_TRUE(r.converged);
}

TEST(n_e, gad_matches_closed_form_positive_variation) {
    const MeasureResult r = n_e(DynamicalMap::gad(kGad), kGrid);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, positive_variation(bell_eof_oracle(r.grid_used)), 1e-9);
    EXPECT_NEAR(r.value, 0.00224386562755, 1e-9);
}

TEST(n_i, identity_is_zero) {
    SearchOptions s;
    s.n_samples = 8;
    s.refine_iters = 2;
    EXPECT_EQ(n_i(DynamicalMap::identity(), TimeGrid{0.0, 1.0, 100}, s).value, 0.0);
}

TEST(n_i, at_least_the_witness_and_deterministic) {
    SearchOptions s;
    s.n_samples = 32;
    s.refine_iters = 10;
    const DynamicalMap map = DynamicalMap::gad(kGad);
    std::vector<Candidate> evaluated;
    const MeasureResult r = n_i(map, kGrid, s, {}, &evaluated);
    ASSERT_EQ(evaluated.size(), 34u);
    const double witness = evaluated[1].value;
    EXPECT_GT(witness, 0.0);
    EXPECT_NEAR(witness,
                positive_variation(trajectory(map, witness_state(), kGrid, Functional::MutualInformation)), 1e-12);
    const double witness_refined =
        positive_variation(trajectory(map, witness_state(), r.grid_used, Functional::MutualInformation));
    EXPECT_GE(r.value, witness_refined - 1e-6);

    const MeasureResult again = n_i(map, kGrid, s);
    EXPECT_EQ(again.value, r.value);
    EXPECT_EQ(again.optimal_state.amplitudes(), r.optimal_state.amplitudes());
}

TEST(check_factorization, identity_and_gad) {
    EXPECT_LE(check_factorization(DynamicalMap::identity(), TimeGrid{0.0, 1.0, 10}, 10, 1).max_residual, 1e-12);
    const FactorizationReport rep = check_factorization(DynamicalMap::gad(kGad), TimeGrid{0.0, 1.0, 49}, 100, 3);
    EXPECT_EQ(rep.states_checked, 100u);
    EXPECT_EQ(rep.points_checked, 50u);
    EXPECT_LE(rep.max_residual, 1e-8);
}

TEST(check_factorization, product_state_stays_separable) {
    const Trajectory tr = trajectory(DynamicalMap::gad(kGad), spin_state(0.0, 1.0, 0.0), TimeGrid{0.0, 1.0, 100},
                                     Functional::Concurrence);
    for (double c : tr.values) EXPECT_LE(c, 1e-12);
}

TEST(concurrence_scaling, positive_variation_property) {
    // Dynamics with concurrence revivals so the scaling is not trivially 0 = 0.
    for (const DynamicalMap& map : {DynamicalMap::gad(kGad), dip_and_recover()}) {
        const TimeGrid g{0.0, 1.0, 1000};
        const double bell = positive_variation(trajectory(map, bell_phi_plus(), g, Functional::Concurrence));
        ASSERT_GT(bell, 0.0);
        std::mt19937_64 rng(89);
        for (int i = 0; i < 20; ++i) {
            const PureState psi = haar_random_pure_state(4, rng);
            const double pv = positive_variation(trajectory(map, psi, g, Functional::Concurrence));
            ASSERT_NEAR(pv, concurrence(psi) * bell, 1e-8);
        }
    }
}

TEST(simultaneous_extrema, sign_of_increments_matches_bell) {
    const DynamicalMap map = DynamicalMap::gad(kGad);
    const TimeGrid g{0.0, 0.3, 600};
    const Trajectory bell = trajectory(map, bell_phi_plus(), g, Functional::Concurrence);
    std::mt19937_64 rng(97);
    for (int i = 0; i < 10; ++i) {
        const PureState psi = haar_random_pure_state(4, rng);
        if (concurrence(psi) <= 1e-6) continue;
        const Trajectory tr = trajectory(map, psi, g, Functional::Concurrence);
        for (std::size_t k = 1; k < g.size(); ++k) {
            const double d = tr.values[k] - tr.values[k - 1];
            const double db = bell.values[k] - bell.values[k - 1];
            if (std::abs(d) > 1e-9) ASSERT_EQ(d > 0, db > 0) << "k=" << k;
        }
    }
}

TEST(grid_refinement, converges_for_fixed_states) {
    const DynamicalMap map = DynamicalMap::gad(kGad);
    const double ne_coarse = positive_variation(trajectory(map, bell_phi_plus(), kGrid, Functional::Eof));
    const double ne_fine = positive_variation(trajectory(map, bell_phi_plus(), kGrid.refined(), Functional::Eof));
    EXPECT_LT(std::abs(ne_fine - ne_coarse), 1e-6);
    const MeasureResult ni = fixed_state_measure(map, witness_state(), kGrid, Functional::MutualInformation);
    EXPECT_TRUE(ni.converged);
    EXPECT_EQ(ni.grid_used.steps, 8000u);
}

TEST(grid_refinement, stops_at_cap) {
    RefinementPolicy tight;
    tight.tolerance = 0.0;
    tight.max_steps = 400;
    const MeasureResult r = n_e(dip_and_recover(), TimeGrid{0.0, 1.0, 100}, tight);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.grid_used.steps, 400u);
}

TEST(detect_regions, synthetic_sequence) {
    const TimeGrid g{0.0, 1.0, 8};
    // delta starts at zero (transient), then the three classes, then a flat tail.
    const Trajectory j{g, {0, 0, 1, 2, 3, 4, 5, 5, 5}};
    const Trajectory d{g, {0, 0, 1, 2, 1.5, 1, 0.5, 0.5, 0.5}};
    const Trajectory i{g, {0, 0, 2, 4, 4.5, 5, 4.9, 4.9, 4.9}};
    const std::vector<Region> regions = detect_regions(j, d, i);
    ASSERT_EQ(regions.size(), 4u);
    EXPECT_EQ(regions[0].signs, kGreenRegion);
    EXPECT_EQ(regions[0].t_begin, g.time(1));
    EXPECT_EQ(regions[1].signs, kBlueRegion);
    EXPECT_EQ(regions[2].signs, kRedRegion);
    EXPECT_EQ(regions[3].signs, (SignTriple{0, 0, 0}));
    const auto pattern = find_three_region_pattern(regions);
    ASSERT_TRUE(pattern.has_value());
    EXPECT_EQ(pattern->blue.first_interval, 3u);
    EXPECT_EQ(pattern->red.t_end, g.time(6));
}

TEST(detect_regions, witness_run_has_three_regions) {
    const Functional fs[] = {Functional::AccessibleAE, Functional::InaccessibleAE, Functional::MutualInformationAE};
    const auto tr = trajectories(DynamicalMap::gad(kGad), witness_state(), kGrid, fs);
    const auto regions = detect_regions(tr[0], tr[1], tr[2]);
    const auto pattern = find_three_region_pattern(regions);
    ASSERT_TRUE(pattern.has_value());
    EXPECT_LT(pattern->green.t_begin, pattern->blue.t_begin);
    EXPECT_EQ(pattern->green.t_end, pattern->blue.t_begin);
    EXPECT_EQ(pattern->blue.t_end, pattern->red.t_begin);
    EXPECT_LE(pattern->red.t_end, 0.25);
}
