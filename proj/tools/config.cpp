#include "config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace cli {

namespace {

std::string trim(const std::string& s) {
    const size_t first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const size_t last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string where(const std::string& path, int line) {
    return path + ":" + std::to_string(line);
}

}  // namespace

ConfigFile parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open config file " + path);
    ConfigFile out;
    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = trim(line);
        if (body.empty() || body[0] == '#') continue;
        if (body.front() == '[') {
            if (body.back() != ']')
                throw UsageError(where(path, lineno) + ": unterminated section header");
            section = trim(body.substr(1, body.size() - 2));
            if (section.empty()) throw UsageError(where(path, lineno) + ": empty section name");
            continue;
        }
        const size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw UsageError(where(path, lineno) + ": expected key = value");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty()) throw UsageError(where(path, lineno) + ": empty key");
        const std::string full = section.empty() ? key : section + "." + key;
        if (out.values.count(full))
            throw UsageError(where(path, lineno) + ": duplicate key " + full);
        out.values[full] = value;
    }
    return out;
}

void Echo::add(const std::string& section, const std::string& key, int64_t value) {
    add(section, key, std::to_string(value));
}

void Echo::add(const std::string& section, const std::string& key, uint64_t value) {
    add(section, key, std::to_string(value));
}

void Echo::add(const std::string& section, const std::string& key, double value) {
    add(section, key, format_double(value));
}

void Echo::add(const std::string& section, const std::string& key, bool value) {
    add(section, key, std::string(value ? "true" : "false"));
}

std::string Echo::text(const std::string& comment) const {
    std::ostringstream out;
    out << "# " << comment << "\n";
    std::string section;
    for (const auto& [full, value] : entries) {
        const size_t dot = full.find('.');
        const std::string sec = full.substr(0, dot);
        const std::string key = full.substr(dot + 1);
        if (sec != section) {
            out << "[" << sec << "]\n";
            section = sec;
        }
        out << key << " = " << value << "\n";
    }
    return out.str();
}

void Echo::write(const std::string& path, const std::string& comment) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RunError("cannot open " + path + " for writing");
    out << text(comment);
    if (!out.flush()) throw RunError("cannot write " + path);
}

int64_t parse_int(const std::string& text, const std::string& what) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (errno != 0 || end == text.c_str() || *end != '\0')
        throw UsageError(what + ": expected an integer, got \"" + text + "\"");
    return v;
}

uint64_t parse_uint(const std::string& text, const std::string& what) {
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
    if (errno != 0 || end == text.c_str() || *end != '\0' || text.find('-') != std::string::npos)
        throw UsageError(what + ": expected a non-negative integer, got \"" + text + "\"");
    return v;
}

double parse_double(const std::string& text, const std::string& what) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (errno != 0 || end == text.c_str() || *end != '\0')
        throw UsageError(what + ": expected a number, got \"" + text + "\"");
    return v;
}

bool parse_bool(const std::string& text, const std::string& what) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw UsageError(what + ": expected true or false, got \"" + text + "\"");
}

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

}  // namespace cli
