#include "run_config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>

#include "qnm/errors.hpp"

namespace qnm::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string normalize_key(std::string_view key) {
    std::string out(key);
    std::replace(out.begin(), out.end(), '_', '-');
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return out;
}

double to_double(std::string_view key, std::string_view text) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError("invalid number for '" + std::string(key) + "': " + std::string(text));
    }
    return v;
}

template <typename Int>
Int to_integer(std::string_view key, std::string_view text) {
    Int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError("invalid integer for '" + std::string(key) + "': " + std::string(text));
    }
    return v;
}

bool to_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ConfigError("invalid boolean for '" + std::string(key) + "': " + std::string(text));
}

} // namespace

StateKind parse_state(std::string_view name) {
    if (name == "bell") return StateKind::Bell;
    if (name == "paper") return StateKind::Paper;
    if (name == "custom") return StateKind::Custom;
    throw ConfigError("unknown state '" + std::string(name) + "' (expected bell, paper or custom)");
}

std::string_view to_string(StateKind s) {
    switch (s) {
    case StateKind::Bell: return "bell";
    case StateKind::Paper: return "paper";
    case StateKind::Custom: return "custom";
    }
    return "?";
}

void RunConfig::validate() const {
    if (channel != "gad") throw ConfigError("unknown channel '" + channel + "' (only gad is available)");
    if (!std::isfinite(omega)) throw ConfigError("omega must be finite");
    if (!(t_c >= 0.0) || !std::isfinite(t_c)) throw ConfigError("tc must be >= 0");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("t-end must be > 0");
    if (steps < 2) throw ConfigError("steps must be >= 2");
    if (samples < 1) throw ConfigError("samples must be >= 1");
    if (state == StateKind::Custom) {
        if (a * a + b * b + c * c > 1.0 + 1e-12) throw ConfigError("custom state needs a^2 + b^2 + c^2 <= 1");
    }
}

DynamicalMap RunConfig::map() const {
    return DynamicalMap::gad(gad());
}

PureState RunConfig::initial_state() const {
    switch (state) {
    case StateKind::Bell: return bell_phi_plus();
    case StateKind::Paper: return witness_state();
    case StateKind::Custom:
        try {
            return spin_state(a, b, c);
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
    }
    throw ConfigError("unknown state");
}

SearchOptions RunConfig::search() const {
    SearchOptions s;
    s.n_samples = samples;
    s.seed = seed;
    s.refine_iters = refine_iters;
    return s;
}

void ConfigLayer::set(std::string_view raw_key, std::string_view raw_value) {
    const std::string key = normalize_key(trim(raw_key));
    const std::string_view value = trim(raw_value);
    if (key == "channel") channel = std::string(value);
    else if (key == "omega") omega = to_double(key, value);
    else if (key == "tc" || key == "t-c") t_c = to_double(key, value);
    else if (key == "t-end") t_end = to_double(key, value);
    else if (key == "steps") steps = to_integer<std::size_t>(key, value);
    else if (key == "state") state = parse_state(value);
    else if (key == "a") a = to_double(key, value);
    else if (key == "b") b = to_double(key, value);
    else if (key == "c") c = to_double(key, value);
    else if (key == "seed") seed = to_integer<std::uint64_t>(key, value);
    else if (key == "out") output_path = std::string(value);
    else if (key == "gnuplot") gnuplot = to_bool(key, value);
    else if (key == "samples") samples = to_integer<std::size_t>(key, value);
    else if (key == "refine-iters") refine_iters = to_integer<std::size_t>(key, value);
    else throw ConfigError("unknown config key '" + std::string(raw_key) + "'");
}

void apply(RunConfig& cfg, const ConfigLayer& layer) {
    if (layer.channel) cfg.channel = *layer.channel;
    if (layer.omega) cfg.omega = *layer.omega;
    if (layer.t_c) cfg.t_c = *layer.t_c;
    if (layer.t_end) cfg.t_end = *layer.t_end;
    if (layer.steps) cfg.steps = *layer.steps;
    if (layer.state) cfg.state = *layer.state;
    if (layer.a) cfg.a = *layer.a;
    if (layer.b) cfg.b = *layer.b;
    if (layer.c) cfg.c = *layer.c;
    if (layer.seed) cfg.seed = *layer.seed;
    if (layer.output_path) cfg.output_path = *layer.output_path;
    if (layer.gnuplot) cfg.gnuplot = *layer.gnuplot;
    if (layer.samples) cfg.samples = *layer.samples;
    if (layer.refine_iters) cfg.refine_iters = *layer.refine_iters;
}

ConfigLayer parse_config_text(std::string_view text) {
    ConfigLayer layer;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
        }
        layer.set(line.substr(0, eq), line.substr(eq + 1));
    }
    return layer;
}

ConfigLayer load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

RunConfig resolve(const ConfigLayer& file, const ConfigLayer& flags) {
    RunConfig cfg;
    apply(cfg, file);
    apply(cfg, flags);
    // Coefficients without an explicit state select the custom state.
    const bool coeffs = file.a || file.b || file.c || flags.a || flags.b || flags.c;
    if (coeffs && !file.state && !flags.state) cfg.state = StateKind::Custom;
    cfg.validate();
    return cfg;
}

} // namespace qnm::cli
