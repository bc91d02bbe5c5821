#pragma once

#include "landau/harness/config.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace landau::harness {

struct RunManifest {
    std::string command;
    std::string version;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    ConfigEntries config;
    std::string started; ///< UTC, ISO 8601
    std::string finished;
    std::vector<std::string> outputs; ///< file names relative to the output directory
    std::uint64_t floor_events = 0;
    std::uint64_t interactions = 0;
    double seconds_per_step = 0;
    std::vector<std::string> warnings;
    std::vector<std::pair<std::string, double>> results; ///< named scalars (fitted slopes etc.)
};

/// Library version, e.g. "0.1.0".
[[nodiscard]] std::string version_string();

[[nodiscard]] std::string utc_timestamp();

/// Serializes to `dir`/manifest.json through a temporary file and a rename.
void write_manifest(std::filesystem::path const &dir, RunManifest const &manifest);

} // namespace landau::harness
