#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace flatlab {

inline constexpr const char* kVersion = "0.1.0";

// Record of one CLI run: command, full parameter set, seed, code version,
// timestamps, and SHA-256 digests of every output file. A run is
// reproducible from its manifest: same seed implies bit-identical outputs.
struct RunManifest {
    std::string command;
    std::vector<std::string> args;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string started;
    std::string finished;
    std::vector<std::pair<std::string, std::string>> outputs;  // (path, sha256)

    void add_output(const std::string& path);
    std::string to_json_string() const;
};

std::string iso8601_now();

// Writes <out_dir>/manifest-<command>.json and returns the path.
std::string write_manifest(const std::string& out_dir, RunManifest& m);

}  // namespace flatlab
