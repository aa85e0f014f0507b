#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vplab {

inline constexpr int kReportSchema = 1;

// One value of a report, in long format.
struct ReportRow {
    std::string scenario;
    std::string check;
    std::string seed;   // empty when not per field
    std::string param;  // e.g. "lambda=0.05"
    std::string quantity;
    double value = 0;
};

struct CheckOutcome {
    std::string check;
    bool passed = false;
    std::string message;
};

struct ScenarioReport {
    std::string name;
    std::string config_yaml;
    std::vector<CheckOutcome> checks;
    std::vector<ReportRow> rows;
    bool failed() const;
};

// Floats use 17 significant digits, so that equal runs give equal bytes.
std::string format_double(double v);

std::string csv_header();
std::string to_csv(const std::vector<ScenarioReport>& reports);
std::string to_json(const std::vector<ScenarioReport>& reports);
std::string summary_text(const std::vector<ScenarioReport>& reports);
const char* commit_stamp();

// Concatenates report CSVs.  Throws std::runtime_error on a schema mismatch.
std::string merge_csv(const std::vector<std::string>& paths);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace vplab
