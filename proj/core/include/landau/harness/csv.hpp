#pragma once

// Comma-separated tables with shortest round-trip float formatting.

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace landau::harness {

/// Shortest decimal that parses back to exactly `v`.
[[nodiscard]] std::string format_double(double v);

class CsvWriter {
public:
    /// Opens `path` for writing and emits the header. Throws Error on failure.
    CsvWriter(std::filesystem::path const &path, std::vector<std::string> const &header);

    void row(std::span<double const> values);
    void close();

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
};

/// Header and numeric rows read back from a file written by CsvWriter.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

[[nodiscard]] CsvTable read_csv(std::filesystem::path const &path);

} // namespace landau::harness
