#include "commands.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "qnm/errors.hpp"

namespace qnm::cli {

namespace {

constexpr std::array kColumns = {Functional::Eof, Functional::MutualInformation, Functional::AccessibleAE,
                                 Functional::InaccessibleAE, Functional::MutualInformationAE};

constexpr std::size_t kFactorizationStates = 100;
constexpr std::size_t kFactorizationPoints = 50;
constexpr double kFactorizationTol = 1e-8;
constexpr std::size_t kCptpSamples = 1000;

std::string format_state(const PureState& psi) {
    std::ostringstream os;
    const Vector& v = psi.amplitudes();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) os << ' ';
        os << format_value(v[i].real());
        const double im = v[i].imag();
        if (std::abs(im) >= 1e-12) os << (im < 0 ? "-" : "+") << format_value(std::abs(im)) << 'i';
    }
    return os.str();
}

void report_measure(std::ostream& out, std::string_view name, const MeasureResult& r) {
    out << name << " = " << format_value(r.value) << '\n';
    out << name << " converged = " << (r.converged ? "true" : "false") << " (steps " << r.grid_used.steps << ")\n";
    out << name << " optimal state [|00> |01> |10> |11>] = " << format_state(r.optimal_state) << '\n';
}

void maybe_gnuplot(const RunConfig& cfg, const std::filesystem::path& csv, const std::vector<std::string>& cols,
                   std::string_view title) {
    if (!cfg.gnuplot) return;
    std::filesystem::path script = csv;
    script.replace_extension(".gp");
    write_text(script, gnuplot_script(csv.filename(), cols, title));
}

} // namespace

std::string format_value(double v) {
    if (std::abs(v) < 1e-12) v = 0.0;
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 12);
    if (ec != std::errc()) throw InvariantError("format_value: conversion failed");
    return std::string(buf.data(), ptr);
}

std::string trajectory_csv(const DynamicalMap& map, const PureState& psi0, const TimeGrid& grid) {
    const std::vector<Trajectory> cols = trajectories(map, psi0, grid, kColumns);
    std::string csv(kTrajectoryHeader);
    csv += '\n';
    for (std::size_t k = 0; k < grid.size(); ++k) {
        csv += format_value(grid.time(k));
        for (const Trajectory& tr : cols) {
            csv += ',';
            csv += format_value(tr.values[k]);
        }
        csv += '\n';
    }
    return csv;
}

void write_text(const std::filesystem::path& path, std::string_view content) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw ConfigError("cannot open " + path.string() + " for writing");
    file.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!file) throw ConfigError("failed writing " + path.string());
}

std::string gnuplot_script(const std::filesystem::path& csv, const std::vector<std::string>& columns,
                           std::string_view title) {
    std::ostringstream gp;
    gp << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << "set xlabel 't'\n"
       << "set title '" << title << "'\n"
       << "plot ";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) gp << ", \\\n     ";
        gp << "'" << csv.string() << "' using 't':'" << columns[i] << "' with lines";
    }
    gp << "\npause -1\n";
    return gp.str();
}

int cmd_trajectory(const RunConfig& cfg, std::ostream& out) {
    const std::string csv = trajectory_csv(cfg.map(), cfg.initial_state(), cfg.grid());
    if (cfg.output_path.empty() || cfg.output_path == "-") {
        out << csv;
        return kExitOk;
    }
    write_text(cfg.output_path, csv);
    maybe_gnuplot(cfg, cfg.output_path, {"eof", "mi", "j_ae", "delta_ae", "i_ae"}, "correlation trajectories");
    return kExitOk;
}

Which parse_which(std::string_view s) {
    if (s == "ne") return Which::Ne;
    if (s == "ni") return Which::Ni;
    if (s == "both") return Which::Both;
    throw ConfigError("unknown measure '" + std::string(s) + "' (expected ne, ni or both)");
}

int cmd_measure(const RunConfig& cfg, Which which, std::ostream& out) {
    const DynamicalMap map = cfg.map();
    const TimeGrid grid = cfg.grid();
    out << "channel = gad omega = " << format_value(cfg.omega) << " tc = " << format_value(cfg.t_c)
        << " grid = [0, " << format_value(cfg.t_end) << "] x " << cfg.steps << '\n';
    if (which != Which::Ni) report_measure(out, "N_E", n_e(map, grid));
    if (which != Which::Ne) {
        std::vector<Candidate> candidates;
        const MeasureResult r = n_i(map, grid, cfg.search(), {}, &candidates);
        report_measure(out, "N_I", r);
        out << "N_I candidates evaluated = " << candidates.size() << " (seed " << cfg.seed << ")\n";
        if (!cfg.output_path.empty() && cfg.output_path != "-") {
            std::string csv = "index,value,re00,im00,re01,im01,re10,im10,re11,im11\n";
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                csv += std::to_string(i) + ',' + format_value(candidates[i].value);
                for (const Complex& z : candidates[i].state.amplitudes()) {
                    csv += ',' + format_value(z.real()) + ',' + format_value(z.imag());
                }
                csv += '\n';
            }
            write_text(cfg.output_path, csv);
        }
    }
    return kExitOk;
}

std::string regions_csv(const std::vector<Region>& regions, const std::optional<RegionPattern>& pattern) {
    auto label = [&](const Region& r) -> std::string {
        if (pattern) {
            if (r.first_interval == pattern->green.first_interval) return "green";
            if (r.first_interval == pattern->blue.first_interval) return "blue";
            if (r.first_interval == pattern->red.first_interval) return "red";
        }
        return "other";
    };
    std::string csv = "region,t_begin,t_end,dJ,ddelta,dI\n";
    for (const Region& r : regions) {
        csv += label(r) + ',' + format_value(r.t_begin) + ',' + format_value(r.t_end) + ',' +
               std::to_string(r.signs.dj) + ',' + std::to_string(r.signs.ddelta) + ',' + std::to_string(r.signs.di) +
               '\n';
    }
    return csv;
}

int cmd_reproduce(const RunConfig& cfg, std::string_view figure, const std::filesystem::path& out_dir,
                  std::ostream& out) {
    if (figure != "fig1" && figure != "fig2" && figure != "fig3") {
        throw ConfigError("unknown figure '" + std::string(figure) + "' (expected fig1, fig2 or fig3)");
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create " + out_dir.string() + ": " + ec.message());

    const DynamicalMap map = cfg.map();
    const TimeGrid grid = cfg.grid();
    const PureState psi0 = figure == "fig1" ? bell_phi_plus() : witness_state();
    const std::filesystem::path csv = out_dir / (std::string(figure) + ".csv");
    write_text(csv, trajectory_csv(map, psi0, grid));
    out << "wrote " << csv.string() << '\n';

    if (figure == "fig1") maybe_gnuplot(cfg, csv, {"eof"}, "entanglement of formation, Bell state");
    if (figure == "fig2") maybe_gnuplot(cfg, csv, {"mi"}, "mutual information, witness state");
    if (figure == "fig3") {
        maybe_gnuplot(cfg, csv, {"j_ae", "delta_ae", "i_ae"}, "ancilla-environment information");
        const Functional fs[] = {Functional::AccessibleAE, Functional::InaccessibleAE,
                                 Functional::MutualInformationAE};
        const std::vector<Trajectory> tr = trajectories(map, psi0, grid, fs);
        const std::vector<Region> regions = detect_regions(tr[0], tr[1], tr[2]);
        const std::optional<RegionPattern> pattern = find_three_region_pattern(regions);
        const std::filesystem::path regions_path = out_dir / "fig3_regions.csv";
        write_text(regions_path, regions_csv(regions, pattern));
        out << "wrote " << regions_path.string() << '\n';
        if (pattern) {
            out << "green [" << format_value(pattern->green.t_begin) << ", " << format_value(pattern->green.t_end)
                << "] blue [" << format_value(pattern->blue.t_begin) << ", " << format_value(pattern->blue.t_end)
                << "] red [" << format_value(pattern->red.t_begin) << ", " << format_value(pattern->red.t_end)
                << "]\n";
        } else {
            out << "three-region pattern not found\n";
        }
    }
    return kExitOk;
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
    const DynamicalMap map = cfg.map();

    double worst_cptp = 0.0;
    for (std::size_t k = 0; k < kCptpSamples; ++k) {
        const double t = cfg.t_end * static_cast<double>(k) / static_cast<double>(kCptpSamples - 1);
        worst_cptp = std::max(worst_cptp, validate_cptp(map(t)));
    }
    const bool cptp_ok = worst_cptp <= kCompletenessTol;
    out << "cptp max deviation = " << format_value(worst_cptp) << " over " << kCptpSamples << " times "
        << (cptp_ok ? "ok" : "FAIL") << '\n';

    const FactorizationReport f =
        check_factorization(map, TimeGrid{0.0, cfg.t_end, kFactorizationPoints - 1}, kFactorizationStates, cfg.seed);
    const bool fact_ok = f.max_residual <= kFactorizationTol;
    out << "factorization max residual = " << format_value(f.max_residual) << " over " << f.states_checked
        << " states x " << f.points_checked << " times " << (fact_ok ? "ok" : "FAIL") << '\n';

    return cptp_ok && fact_ok ? kExitOk : kExitNumerical;
}

} // namespace qnm::cli
