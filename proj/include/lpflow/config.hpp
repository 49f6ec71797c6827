#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

namespace lpflow {

struct config_error : std::runtime_error {
    int line;   // 0 when not tied to a file line
    config_error(int line_, const std::string& msg)
        : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg),
          line(line_) {}
};

// Line-oriented configuration:
//   # comment
//   [section]
//   key = value
// Keys are addressed as "section.key". Blank lines are ignored; values are
// trimmed verbatim strings.
class ConfigFile {
public:
    struct Entry {
        std::string value;
        int line = 0;
    };

    static ConfigFile parse_file(const std::filesystem::path& path);
    static ConfigFile parse_string(const std::string& text);

    const Entry* find(const std::string& dotted_key) const {
        auto it = entries_.find(dotted_key);
        return it == entries_.end() ? nullptr : &it->second;
    }

    // Every file key must belong to the schema; unknown keys raise a
    // config_error naming the offending line.
    void check_known_keys(const std::set<std::string>& schema) const;

    const std::map<std::string, Entry>& entries() const { return entries_; }

private:
    std::map<std::string, Entry> entries_;
};

// Pulls typed values out of a ConfigFile, applying defaults and recording
// every resolved setting (including the defaults that applied) for the
// config.resolved snapshot. CLI-level overrides are injected with push().
class Settings {
public:
    explicit Settings(ConfigFile file) : file_(std::move(file)) {}

    // override wins over file value and default
    void push(const std::string& dotted_key, const std::string& value) {
        overrides_[dotted_key] = value;
    }

    std::string get_string(const std::string& key, const std::string& def);
    double get_double(const std::string& key, double def);
    int get_int(const std::string& key, int def);
    uint64_t get_u64(const std::string& key, uint64_t def);

    const ConfigFile& file() const { return file_; }

    // "[section]\nkey = value" blocks covering everything resolved so far
    std::string resolved_snapshot() const;

private:
    std::string raw(const std::string& key, const std::string& def, int& line);

    ConfigFile file_;
    std::map<std::string, std::string> overrides_;
    std::map<std::string, std::string> resolved_;
};

}  // namespace lpflow
