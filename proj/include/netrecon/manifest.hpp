#pragma once

#include <cstdint>
#include <string>

#include "config.hpp"

namespace netrecon {

// FNV-1a over the raw bytes of a file; cheap fingerprint for the manifest
std::uint64_t fnv1a64_file(const std::string& path);
std::string hex64(std::uint64_t v);

// Reproducibility record written next to a command's outputs: the config as
// run, the master seed, hashes of every input and output file, and
// wall-clock timings per phase.
class RunManifest {
  public:
    RunManifest(std::string command, Json config, std::uint64_t seed);

    void add_input(const std::string& path);   // hashed now
    void add_output(const std::string& path);  // hashed now; call after writing
    void add_timing(const std::string& phase, double seconds);
    void set_field(const std::string& key, Json value);

    const Json& json() const { return m_; }
    void write(const std::string& path) const;

  private:
    Json m_;
};

}  // namespace netrecon
