#include "landau/harness/csv.hpp"

#include "landau/errors.hpp"

#include <array>
#include <charconv>
#include <sstream>

namespace landau::harness {

std::string format_double(double v)
{
    std::array<char, 32> buf{};
    auto const [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{})
        throw Error("format_double: conversion failed");
    return {buf.data(), ptr};
}

CsvWriter::CsvWriter(std::filesystem::path const &path, std::vector<std::string> const &header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(header.size())
{
    if (!out_)
        throw Error("cannot open '" + path.string() + "' for writing");
    for (std::size_t i = 0; i < header.size(); ++i)
        out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::row(std::span<double const> values)
{
    if (values.size() != columns_)
        throw SizeMismatch("csv row for '" + path_.string() + "' has " + std::to_string(values.size()) +
                           " values, header has " + std::to_string(columns_));
    for (std::size_t i = 0; i < values.size(); ++i)
        out_ << (i ? "," : "") << format_double(values[i]);
    out_ << '\n';
}

void CsvWriter::close()
{
    out_.close();
    if (!out_)
        throw Error("failed writing '" + path_.string() + "'");
}

CsvTable read_csv(std::filesystem::path const &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path.string() + "'");
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (first) {
            table.header = std::move(cells);
            first = false;
            continue;
        }
        std::vector<double> row;
        for (auto const &c : cells) {
            double v = 0;
            auto const [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
            if (ec != std::errc{} || ptr != c.data() + c.size())
                throw Error("'" + path.string() + "': bad number '" + c + "'");
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace landau::harness
