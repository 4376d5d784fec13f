#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace netrecon {

using Json = nlohmann::json;

// Parses a JSON file, reporting parse and I/O failures as config_error with
// the file path in the message.
Json load_json_file(const std::string& path);

// Typed field access whose errors name the full key path, so a bad config
// fails with "sample.burn_in: expected an integer" instead of a bare json
// type error.
class ConfigView {
  public:
    explicit ConfigView(Json j, std::string path = "");

    bool has(const std::string& key) const;

    ConfigView sub(const std::string& key) const;           // required object
    ConfigView sub_or_empty(const std::string& key) const;  // object or {}

    double num(const std::string& key) const;
    double num(const std::string& key, double fallback) const;
    std::int64_t integer(const std::string& key) const;
    std::int64_t integer(const std::string& key, std::int64_t fallback) const;
    bool flag(const std::string& key, bool fallback) const;
    std::string str(const std::string& key) const;
    std::string str(const std::string& key, const std::string& fallback) const;
    std::vector<double> num_list(const std::string& key,
                                 std::vector<double> fallback = {}) const;
    std::vector<std::int64_t> int_list(
        const std::string& key, std::vector<std::int64_t> fallback = {}) const;

    const Json& raw() const { return j_; }
    const std::string& path() const { return path_; }

  private:
    [[noreturn]] void fail(const std::string& key,
                           const std::string& what) const;
    const Json& require(const std::string& key) const;
    std::string child_path(const std::string& key) const;

    Json j_;
    std::string path_;
};

}  // namespace netrecon
