#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qnm/channels.hpp"
#include "qnm/linalg.hpp"
#include "qnm/nonmarkov.hpp"

namespace qnm::cli {

// Usage or configuration problem; maps to exit status 1.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class StateKind { Bell, Paper, Custom };

struct RunConfig {
    std::string channel = "gad";
    double omega = 5.0;
    double t_c = 0.25;
    double t_end = 1.0;
    std::size_t steps = 4000;
    StateKind state = StateKind::Bell;
    double a = SpinCoefficients::a;
    double b = SpinCoefficients::b;
    double c = SpinCoefficients::c;
    std::uint64_t seed = 42;
    std::string output_path;
    bool gnuplot = false;
    std::size_t samples = 512;
    std::size_t refine_iters = 100;

    void validate() const;

    GadParams gad() const { return {omega, t_c}; }
    TimeGrid grid() const { return {0.0, t_end, steps}; }
    DynamicalMap map() const;
    PureState initial_state() const;
    SearchOptions search() const;
};

/// Every field optional; unset fields leave the lower layer untouched.
struct ConfigLayer {
    std::optional<std::string> channel;
    std::optional<double> omega;
    std::optional<double> t_c;
    std::optional<double> t_end;
    std::optional<std::size_t> steps;
    std::optional<StateKind> state;
    std::optional<double> a;
    std::optional<double> b;
    std::optional<double> c;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_path;
    std::optional<bool> gnuplot;
    std::optional<std::size_t> samples;
    std::optional<std::size_t> refine_iters;

    /// Sets one field from its textual key (flag name without dashes; '_' and '-' interchangeable).
    void set(std::string_view key, std::string_view value);
};

void apply(RunConfig& cfg, const ConfigLayer& layer);

/// Flat key=value text with '#' comments and blank lines.
ConfigLayer parse_config_text(std::string_view text);
ConfigLayer load_config_file(const std::filesystem::path& path);

/// defaults <- config file <- command line flags.
RunConfig resolve(const ConfigLayer& file, const ConfigLayer& flags);

StateKind parse_state(std::string_view name);
std::string_view to_string(StateKind s);

} // namespace qnm::cli
