#pragma once

#include <map>
#include <string>

#include "comblink/types.hpp"

namespace comblink {

// Minimal INI reader: [section] headers, key = value pairs, '#' and ';'
// comments. Keys are addressed as "section.key".
class IniDoc {
public:
    static IniDoc parse(const std::string& text);
    static IniDoc parse_file(const std::string& path);

    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

}  // namespace comblink
