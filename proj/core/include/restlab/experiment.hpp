#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace restlab {

// One experiment run: a kind, its parameter block, and the artifact plumbing.
// The same config and seed always produce byte-identical CSV and JSON; wall
// times are kept on the records but never serialized.
struct ExperimentConfig {
    std::string kind;           // exponents | weights | decay | extend-scaling | wavepackets
    nlohmann::json params = nlohmann::json::object();
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    int threads = 1;
    std::string format = "csv";  // table format; the JSON summary is always written

    void validate() const;
    nlohmann::json echo() const;
    static ExperimentConfig from_file(const std::string& path);
};

struct ExperimentRecord {
    std::string point;   // parameter point label
    double value = 0.0;  // computed quantity
    double bound = 0.0;  // theorem bound it is compared against
    bool pass = true;
    double wall_s = 0.0;
};

struct ExperimentResult {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // cells already formatted
    nlohmann::json summary;                      // has artifact_version, config_echo, pass
    std::vector<ExperimentRecord> records;
    bool pass = true;
    std::string csv_path;
    std::string json_path;
    std::string plot_path;  // empty unless the run emitted a plot
};

// Computes the records for the config and writes <out>/<kind>.csv and
// <out>/<kind>.json (plus <kind>.svg when the config asks for a plot).
// Throws usage_error for an invalid config and precondition_error when a
// numerical precondition is violated; partial record failures do not throw,
// they clear `pass` and are listed in the summary under "failures".
ExperimentResult run(const ExperimentConfig& cfg);

// Shortest byte-stable decimal for doubles in artifacts (%.17g).
std::string format_double(double v);

// Renders a CSV produced by `run` as a self-contained SVG: log-log scatter
// with a least-squares line for decay/scaling tables, the exponent curve
// with breakpoint markers for exponent tables.  The column set decides the
// style; empty or unrecognized tables are errors and no file is written.
void emit_plot(const std::string& csv_path, const std::string& svg_path);

}  // namespace restlab
