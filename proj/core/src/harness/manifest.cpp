#include "landau/harness/manifest.hpp"

#include "landau/errors.hpp"

#include "json.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#ifndef LANDAU_VERSION
#define LANDAU_VERSION "unknown"
#endif

namespace landau::harness {

std::string version_string()
{
    return LANDAU_VERSION;
}

std::string utc_timestamp()
{
    auto const now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_manifest(std::filesystem::path const &dir, RunManifest const &m)
{
    nlohmann::ordered_json j;
    j["command"] = m.command;
    j["version"] = m.version;
    j["seed"] = m.seed;
    j["workers"] = m.workers;
    auto &config = j["config"] = nlohmann::ordered_json::object();
    for (auto const &[key, entry] : m.config)
        config[key] = entry.value;
    j["started"] = m.started;
    j["finished"] = m.finished;
    j["outputs"] = m.outputs;
    j["floor_events"] = m.floor_events;
    j["interactions"] = m.interactions;
    j["floor_fraction"] =
        m.interactions ? static_cast<double>(m.floor_events) / static_cast<double>(m.interactions) : 0.0;
    j["seconds_per_step"] = m.seconds_per_step;
    j["warnings"] = m.warnings;
    auto &results = j["results"] = nlohmann::ordered_json::object();
    for (auto const &[name, value] : m.results)
        results[name] = value;

    auto const target = dir / "manifest.json";
    auto const tmp = dir / "manifest.json.tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("cannot write '" + tmp.string() + "'");
        out << j.dump(2) << '\n';
        out.close();
        if (!out)
            throw Error("failed writing '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, target);
}

} // namespace landau::harness
