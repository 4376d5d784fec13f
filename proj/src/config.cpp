#include "netrecon/config.hpp"

#include <cmath>
#include <fstream>

#include "netrecon/errors.hpp"

namespace netrecon {

Json load_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw config_error("cannot open config file " + path);
    try {
        return Json::parse(f);
    } catch (const Json::parse_error& e) {
        throw config_error(path + ": " + e.what());
    }
}

ConfigView::ConfigView(Json j, std::string path)
    : j_(std::move(j)), path_(std::move(path)) {
    if (!j_.is_object())
        throw config_error((path_.empty() ? std::string("config") : path_) +
                           ": expected an object");
}

std::string ConfigView::child_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
}

void ConfigView::fail(const std::string& key, const std::string& what) const {
    throw config_error(child_path(key) + ": " + what);
}

bool ConfigView::has(const std::string& key) const {
    return j_.contains(key);
}

const Json& ConfigView::require(const std::string& key) const {
    auto it = j_.find(key);
    if (it == j_.end()) fail(key, "missing required key");
    return *it;
}

ConfigView ConfigView::sub(const std::string& key) const {
    const Json& v = require(key);
    if (!v.is_object()) fail(key, "expected an object");
    return ConfigView(v, child_path(key));
}

ConfigView ConfigView::sub_or_empty(const std::string& key) const {
    if (!has(key)) return ConfigView(Json::object(), child_path(key));
    return sub(key);
}

double ConfigView::num(const std::string& key) const {
    const Json& v = require(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
}

double ConfigView::num(const std::string& key, double fallback) const {
    return has(key) ? num(key) : fallback;
}

std::int64_t ConfigView::integer(const std::string& key) const {
    const Json& v = require(key);
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number()) {
        double d = v.get<double>();
        if (std::floor(d) == d && std::abs(d) < 9.0e15)
            return static_cast<std::int64_t>(d);
    }
    fail(key, "expected an integer");
}

std::int64_t ConfigView::integer(const std::string& key,
                                 std::int64_t fallback) const {
    return has(key) ? integer(key) : fallback;
}

bool ConfigView::flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
}

std::string ConfigView::str(const std::string& key) const {
    const Json& v = require(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
}

std::string ConfigView::str(const std::string& key,
                            const std::string& fallback) const {
    return has(key) ? str(key) : fallback;
}

std::vector<double> ConfigView::num_list(const std::string& key,
                                         std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_array()) fail(key, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number()) fail(key, "expected an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<std::int64_t> ConfigView::int_list(
    const std::string& key, std::vector<std::int64_t> fallback) const {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_array()) fail(key, "expected an array of integers");
    std::vector<std::int64_t> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number_integer()) fail(key, "expected an array of integers");
        out.push_back(e.get<std::int64_t>());
    }
    return out;
}

}  // namespace netrecon
