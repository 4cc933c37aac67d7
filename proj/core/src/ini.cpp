#include "comblink/ini.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace comblink {

namespace {

std::string strip(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

IniDoc IniDoc::parse(const std::string& text) {
    IniDoc doc;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto cpos = line.find_first_of("#;");
        if (cpos != std::string::npos) line = line.substr(0, cpos);
        line = strip(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw parse_error("ini line " + std::to_string(lineno) +
                                  ": unterminated section header");
            section = strip(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw parse_error("ini line " + std::to_string(lineno) +
                              ": expected key = value");
        const std::string key = strip(line.substr(0, eq));
        const std::string val = strip(line.substr(eq + 1));
        if (key.empty())
            throw parse_error("ini line " + std::to_string(lineno) + ": empty key");
        doc.kv_[section.empty() ? key : section + "." + key] = val;
    }
    return doc;
}

IniDoc IniDoc::parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw parse_error("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

std::string IniDoc::get(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double IniDoc::get_double(const std::string& key, double fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
    if (v == "-inf") return -std::numeric_limits<double>::infinity();
    try {
        std::size_t pos = 0;
        const double d = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (const std::exception&) {
        throw parse_error("key '" + key + "': not a number: '" + it->second + "'");
    }
}

long long IniDoc::get_int(const std::string& key, long long fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw parse_error("key '" + key + "': not an integer: '" + it->second + "'");
    }
}

bool IniDoc::get_bool(const std::string& key, bool fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw parse_error("key '" + key + "': not a boolean: '" + it->second + "'");
}

}  // namespace comblink
