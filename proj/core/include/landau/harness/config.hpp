#pragma once

// Experiment configuration files.
//
//     # comment
//     [kernel]
//     family = soft
//     gamma = -1
//     run.n = 2000        # table-qualified keys work in any section
//
// Section headers prefix the keys that follow them. Every key is checked;
// unknown keys and malformed values raise ConfigError with the line number.

#include "landau/integrator.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace landau::harness {

struct RateSettings {
    std::vector<std::size_t> n_values{50, 100, 200, 400, 800, 1600};
    std::vector<std::uint32_t> N_values{25, 50, 100, 200, 400};
    std::uint32_t refinement = 2;
    unsigned bootstrap = 2000;
};

struct HistSettings {
    std::size_t bins = 80;
    double lo = -3.0;
    double hi = 3.0;
    std::size_t coord = 2; ///< 1-based
    std::vector<double> times{0.1, 0.5, 2.5};
    std::vector<double> gammas{0.0, -1.0, -2.0};
};

struct LemmaSettings {
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
};

/// Raw key/value pairs with the line each came from (0 for overrides).
struct ConfigEntry {
    std::string value;
    int line = 0;
};
using ConfigEntries = std::map<std::string, ConfigEntry>;

struct RunConfig {
    SimConfig sim;
    RateSettings rate;
    HistSettings hist;
    LemmaSettings lemmas;
    /// Ellipticity monitoring at every snapshot; unset means on only when the
    /// field is evaluated from moments (monitoring a pairwise field costs a step).
    std::optional<bool> monitor;
    ConfigEntries entries; ///< what was read, after overrides; echoed into manifests
};

/// Splits text into entries. Throws ConfigError on syntax errors and repeated keys.
[[nodiscard]] ConfigEntries parse_entries(std::string_view text);

/// Builds and validates a configuration from entries.
[[nodiscard]] RunConfig build_config(ConfigEntries entries);

[[nodiscard]] RunConfig parse_config(std::string_view text);

/// Reads a config file, or a run manifest (JSON) whose "config" object is
/// taken as the entries. Applies the LANDAU_OUT_DIR override.
[[nodiscard]] RunConfig load_config(std::filesystem::path const &path);

/// Sets `key` to `value` and rebuilds.
void override_entry(RunConfig &config, std::string const &key, std::string const &value);

/// Output directory after the environment override.
[[nodiscard]] std::filesystem::path output_dir(RunConfig const &config);

inline constexpr char const *kOutDirEnv = "LANDAU_OUT_DIR";

} // namespace landau::harness
