#include "netrecon/manifest.hpp"

#include <cstdio>
#include <fstream>

#include "netrecon/errors.hpp"

namespace netrecon {

namespace {
constexpr const char* kVersion = "0.1.0";
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw data_error("cannot read " + path);
    std::uint64_t h = 1469598103934665603ull;
    char buf[1 << 15];
    while (f) {
        f.read(buf, sizeof buf);
        for (std::streamsize k = 0; k < f.gcount(); ++k) {
            h ^= static_cast<unsigned char>(buf[k]);
            h *= 1099511628211ull;
        }
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(v));
    return buf;
}

RunManifest::RunManifest(std::string command, Json config, std::uint64_t seed) {
    m_["command"] = std::move(command);
    m_["version"] = kVersion;
    m_["seed"] = seed;
    m_["config"] = std::move(config);
    m_["inputs"] = Json::object();
    m_["outputs"] = Json::object();
    m_["timings"] = Json::object();
}

void RunManifest::add_input(const std::string& path) {
    m_["inputs"][path] = hex64(fnv1a64_file(path));
}

void RunManifest::add_output(const std::string& path) {
    m_["outputs"][path] = hex64(fnv1a64_file(path));
}

void RunManifest::add_timing(const std::string& phase, double seconds) {
    m_["timings"][phase] = seconds;
}

void RunManifest::set_field(const std::string& key, Json value) {
    m_[key] = std::move(value);
}

void RunManifest::write(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw data_error("cannot write " + path);
    f << m_.dump(2) << "\n";
    if (!f.good()) throw data_error("write failed on " + path);
}

}  // namespace netrecon
