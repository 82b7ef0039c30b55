#pragma once

// CSV emission (RFC-4180-compatible, 17 significant digits) and the
// machine-readable run manifest written next to every output file.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scalekernel/config.hpp"
#include "scalekernel/errors.hpp"
#include "scalekernel/version.hpp"

namespace scalekernel::cli {

/// Serializes a double with 17 significant digits ('.' decimal, no locale).
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(const std::vector<std::string>& cells) {
        if (cells.size() != header_.size())
            throw Error("csv row width does not match header");
        rows_.push_back(cells);
    }

    void add_numeric_row(const std::vector<double>& values) {
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values) cells.push_back(format_number(v));
        add_row(cells);
    }

    std::string body() const {
        std::string out;
        for (std::size_t i = 0; i < header_.size(); ++i) {
            if (i) out += ',';
            out += header_[i];
        }
        out += '\n';
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out += ',';
                out += row[i];
            }
            out += '\n';
        }
        return out;
    }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot open output file '" + path + "'");
        out << body();
    }

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

struct RunManifest {
    std::string command;
    std::string config_digest;
    std::string versions;
    std::uint64_t seed = 0;
    bool stochastic = false;
    long wall_time_ms = 0;
};

inline void write_manifest(const RunManifest& m, const std::string& output_path) {
    nlohmann::json j;
    j["command"] = m.command;
    j["config_digest"] = m.config_digest;
    j["versions"] = m.versions;
    if (m.stochastic) j["seed"] = m.seed;
    j["wall_time_ms"] = m.wall_time_ms;
    std::ofstream out(output_path + ".manifest.json", std::ios::binary);
    if (!out) throw Error("cannot open manifest file for '" + output_path + "'");
    out << j.dump(2) << '\n';
}

class WallClock {
  public:
    WallClock() : start_(std::chrono::steady_clock::now()) {}
    long elapsed_ms() const {
        return static_cast<long>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                     std::chrono::steady_clock::now() - start_)
                                     .count());
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace scalekernel::cli
