#pragma once

#include "sigma2/report.hpp"

namespace s2 {

enum class KeyType { string, integer, real, u64 };

struct ConfigKey {
    std::string key;
    KeyType type;
    std::string dflt;
    std::string doc;
};

// Every accepted key with its default, in echo order.
const std::vector<ConfigKey>& config_keys();

struct RunConfig {
    std::vector<std::pair<std::string, std::string>> values;  // effective, table order
    std::vector<std::string> given;                           // keys set explicitly

    std::string str(const std::string& key) const;
    double real(const std::string& key) const;
    long integer(const std::string& key) const;
    std::uint64_t u64(const std::string& key) const;
    // validated like a config line; throws Errc::config
    void set(const std::string& key, const std::string& value);
    std::string echo() const;
};

RunConfig default_config();
// Flat `key = value` lines, `#` comments. Errors name the origin and line.
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");

struct RunResult {
    json report;
    std::vector<Table> tables;
    std::vector<Table> plots;
    std::vector<std::string> summary;  // one-line human readable notes
    int exit_code = 0;
};

const std::vector<std::string>& commands();
RunResult execute(const std::string& command, const RunConfig& cfg);
// report.json, effective_config.txt, tables/*.csv, plotdata/*.csv
void write_outputs(const std::string& dir, const RunConfig& cfg, const RunResult& r);

// Canned reproduction cases.
struct Check {
    std::string name;
    double value = 0;
    double target = 0;
    double tol = 0;
    std::string relation;  // abs | rel | le | ge | in | true
    bool pass = false;
};

struct CaseResult {
    std::string name;
    std::string citation;  // the reproduced claim, in words
    json data;
    std::vector<Check> checks;
    std::vector<Table> tables, plots;
    bool passed() const;
};

const std::vector<std::string>& reproduce_case_names();
CaseResult reproduce_case(const std::string& name, const RunConfig& cfg);
json to_json(const Check& c);

}  // namespace s2
