#pragma once

// Config file handling for the CLI: a flat `key = value` format with
// [section] headers, LF line endings, and # comments. Flags override file
// values; the fully resolved settings are echoed back out in the same
// format so a run can be reproduced from its own echo.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cli {

// Exit code 2: the invocation or its input files are at fault.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exit code 1: the pipeline failed mid-flight.
struct RunError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigFile {
    // keyed "section.key", or bare "key" for entries above any section
    std::map<std::string, std::string> values;

    bool has(const std::string& key) const { return values.count(key) != 0; }
    const std::string& get(const std::string& key) const { return values.at(key); }
};

ConfigFile parse_config(const std::string& path);

// Resolved settings in emission order, grouped by section.
struct Echo {
    std::vector<std::pair<std::string, std::string>> entries;  // "section.key" -> value

    void add(const std::string& section, const std::string& key, const std::string& value) {
        entries.emplace_back(section + "." + key, value);
    }
    void add(const std::string& section, const std::string& key, int64_t value);
    void add(const std::string& section, const std::string& key, uint64_t value);
    void add(const std::string& section, const std::string& key, double value);
    void add(const std::string& section, const std::string& key, bool value);

    // comment becomes the leading "# ..." line
    std::string text(const std::string& comment) const;
    void write(const std::string& path, const std::string& comment) const;
};

// Strict scalar parsers; the whole string must be consumed.
int64_t parse_int(const std::string& text, const std::string& what);
uint64_t parse_uint(const std::string& text, const std::string& what);
double parse_double(const std::string& text, const std::string& what);
bool parse_bool(const std::string& text, const std::string& what);

// "%.17g", enough digits to round-trip a double exactly.
std::string format_double(double value);

}  // namespace cli
