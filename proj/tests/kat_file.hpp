#pragma once

// Parser for NIST-style .rsp response files: "label = HEXVALUE" lines
// grouped per count, groups separated by blank lines.

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qgp/bytes.hpp"

namespace kat {

using Record = std::map<std::string, std::string>;

inline std::vector<Record> load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open KAT file: " + path);
    std::vector<Record> records;
    Record current;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') {
            if (!current.empty()) {
                records.push_back(std::move(current));
                current.clear();
            }
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            s.erase(0, s.find_first_not_of(" \t"));
            s.erase(s.find_last_not_of(" \t") + 1);
        };
        trim(key);
        trim(value);
        current[key] = value;
    }
    if (!current.empty()) records.push_back(std::move(current));
    return records;
}

inline qgp::Bytes hex(const Record& r, const std::string& key) {
    std::string v = r.at(key);
    std::string lower;
    for (char c : v) lower.push_back(static_cast<char>(std::tolower(c)));
    return qgp::hex_decode(lower);
}

}  // namespace kat
