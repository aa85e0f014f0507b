#include "vplab/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "json.hpp"

#ifndef VPLAB_COMMIT
#define VPLAB_COMMIT "unknown"
#endif

namespace vplab {

namespace {

constexpr const char* kColumns = "scenario,check,seed,param,quantity,value";

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

nlohmann::json json_value(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

}  // namespace

bool ScenarioReport::failed() const {
    for (const CheckOutcome& c : checks)
        if (!c.passed) return true;
    return false;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", v);
}

std::string csv_header() { return fmt::format("# vplab-report schema={}\n{}\n", kReportSchema, kColumns); }

std::string to_csv(const std::vector<ScenarioReport>& reports) {
    std::string out = csv_header();
    for (const ScenarioReport& r : reports) {
        for (const ReportRow& row : r.rows)
            out += fmt::format("{},{},{},{},{},{}\n", csv_field(row.scenario), csv_field(row.check),
                               csv_field(row.seed), csv_field(row.param), csv_field(row.quantity),
                               format_double(row.value));
        for (const CheckOutcome& c : r.checks)
            out += fmt::format("{},{},,,passed,{}\n", csv_field(r.name), csv_field(c.check), c.passed ? 1 : 0);
    }
    return out;
}

std::string to_json(const std::vector<ScenarioReport>& reports) {
    nlohmann::json j;
    j["schema"] = kReportSchema;
    j["commit"] = commit_stamp();
    j["scenarios"] = nlohmann::json::array();
    for (const ScenarioReport& r : reports) {
        nlohmann::json s;
        s["name"] = r.name;
        s["config"] = r.config_yaml;
        s["checks"] = nlohmann::json::array();
        for (const CheckOutcome& c : r.checks)
            s["checks"].push_back({{"check", c.check}, {"passed", c.passed}, {"message", c.message}});
        s["rows"] = nlohmann::json::array();
        for (const ReportRow& row : r.rows)
            s["rows"].push_back({{"check", row.check},
                                 {"seed", row.seed},
                                 {"param", row.param},
                                 {"quantity", row.quantity},
                                 {"value", json_value(row.value)}});
        j["scenarios"].push_back(std::move(s));
    }
    // max_digits10 round-trips every double
    return j.dump(1) + "\n";
}

std::string summary_text(const std::vector<ScenarioReport>& reports) {
    std::string out;
    for (const ScenarioReport& r : reports) {
        out += fmt::format("scenario {}: {}\n", r.name, r.failed() ? "FAILED" : "ok");
        for (const CheckOutcome& c : r.checks)
            out += fmt::format("  {:<18} {}{}\n", c.check, c.passed ? "pass" : "FAIL",
                               c.message.empty() ? "" : "  " + c.message);
    }
    return out;
}

const char* commit_stamp() { return VPLAB_COMMIT; }

std::string merge_csv(const std::vector<std::string>& paths) {
    std::string out = csv_header();
    for (const std::string& p : paths) {
        std::istringstream in(read_text(p));
        std::string schema, columns, line;
        std::getline(in, schema);
        std::getline(in, columns);
        if (schema + "\n" + columns + "\n" != csv_header())
            throw std::runtime_error("schema mismatch in " + p);
        while (std::getline(in, line))
            if (!line.empty()) out += line + "\n";
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace vplab
