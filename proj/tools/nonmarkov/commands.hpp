#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "qnm/nonmarkov.hpp"
#include "run_config.hpp"

namespace qnm::cli {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2 };

inline constexpr std::string_view kTrajectoryHeader = "t,eof,mi,j_ae,delta_ae,i_ae";

/// Twelve significant digits, '.' decimal point, no locale. Magnitudes below
/// 1e-12 print as 0.
std::string format_value(double v);

/// Rows t,eof,mi,j_ae,delta_ae,i_ae for one initial state.
std::string trajectory_csv(const DynamicalMap& map, const PureState& psi0, const TimeGrid& grid);

/// Writes `content` to `path`; throws ConfigError if it cannot be written.
void write_text(const std::filesystem::path& path, std::string_view content);

std::string gnuplot_script(const std::filesystem::path& csv, const std::vector<std::string>& columns,
                           std::string_view title);

/// `trajectory`: CSV to cfg.output_path, or to `out` if the path is empty or "-".
int cmd_trajectory(const RunConfig& cfg, std::ostream& out);

enum class Which { Ne, Ni, Both };
Which parse_which(std::string_view s);

/// `measure`: text report to `out`; candidate CSV to cfg.output_path when set.
int cmd_measure(const RunConfig& cfg, Which which, std::ostream& out);

/// `reproduce`: figure CSVs (and, for fig3, the regions file) under `out_dir`.
int cmd_reproduce(const RunConfig& cfg, std::string_view figure, const std::filesystem::path& out_dir,
                  std::ostream& out);

/// `check`: CPTP and concurrence-factorization validators.
int cmd_check(const RunConfig& cfg, std::ostream& out);

std::string regions_csv(const std::vector<Region>& regions, const std::optional<RegionPattern>& pattern);

} // namespace qnm::cli
