#include "lpflow/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace lpflow {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool valid_identifier(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    }
    return true;
}

}  // namespace

ConfigFile ConfigFile::parse_string(const std::string& text) {
    ConfigFile cf;
    std::istringstream is(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw config_error(line_no, "unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (!valid_identifier(section)) {
                throw config_error(line_no, "bad section name '" + section + "'");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw config_error(line_no, "expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!valid_identifier(key)) {
            throw config_error(line_no, "bad key name '" + key + "'");
        }
        if (section.empty()) {
            throw config_error(line_no, "key '" + key + "' outside any [section]");
        }
        if (value.empty()) {
            throw config_error(line_no, "empty value for key '" + key + "'");
        }
        const std::string dotted = section + "." + key;
        if (cf.entries_.count(dotted)) {
            throw config_error(line_no, "duplicate key '" + dotted + "'");
        }
        cf.entries_[dotted] = Entry{value, line_no};
    }
    return cf;
}

ConfigFile ConfigFile::parse_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw config_error(0, "cannot open config file: " + path.string());
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_string(ss.str());
}

void ConfigFile::check_known_keys(const std::set<std::string>& schema) const {
    for (const auto& [key, entry] : entries_) {
        if (!schema.count(key)) {
            throw config_error(entry.line, "unknown config key '" + key + "'");
        }
    }
}

std::string Settings::raw(const std::string& key, const std::string& def, int& line) {
    line = 0;
    auto ov = overrides_.find(key);
    if (ov != overrides_.end()) {
        resolved_[key] = ov->second;
        return ov->second;
    }
    if (const auto* e = file_.find(key)) {
        line = e->line;
        resolved_[key] = e->value;
        return e->value;
    }
    resolved_[key] = def;
    return def;
}

std::string Settings::get_string(const std::string& key, const std::string& def) {
    int line = 0;
    return raw(key, def, line);
}

double Settings::get_double(const std::string& key, double def) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", def);
    int line = 0;
    const std::string v = raw(key, buf, line);
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw config_error(line, "field '" + key + "': expected a number, got '" + v + "'");
    }
}

int Settings::get_int(const std::string& key, int def) {
    int line = 0;
    const std::string v = raw(key, std::to_string(def), line);
    try {
        size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size() || x < INT32_MIN || x > INT32_MAX) throw std::invalid_argument(v);
        return static_cast<int>(x);
    } catch (const std::exception&) {
        throw config_error(line, "field '" + key + "': expected an integer, got '" + v + "'");
    }
}

uint64_t Settings::get_u64(const std::string& key, uint64_t def) {
    int line = 0;
    const std::string v = raw(key, std::to_string(def), line);
    try {
        size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return static_cast<uint64_t>(x);
    } catch (const std::exception&) {
        throw config_error(line, "field '" + key + "': expected an unsigned integer, got '" + v + "'");
    }
}

std::string Settings::resolved_snapshot() const {
    std::string out;
    std::string section;
    for (const auto& [key, value] : resolved_) {
        const auto dot = key.find('.');
        const std::string sec = key.substr(0, dot);
        if (sec != section) {
            if (!out.empty()) out += '\n';
            out += "[" + sec + "]\n";
            section = sec;
        }
        out += key.substr(dot + 1) + " = " + value + "\n";
    }
    return out;
}

}  // namespace lpflow
