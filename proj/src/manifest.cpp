#include "flatlab/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include <json.hpp>

#include "flatlab/util.hpp"

namespace flatlab {

std::string iso8601_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void RunManifest::add_output(const std::string& path) {
    outputs.push_back({path, sha256_file_hex(path)});
}

std::string RunManifest::to_json_string() const {
    nlohmann::json j;
    j["command"] = command;
    j["args"] = args;
    j["seed"] = seed;
    j["threads"] = threads;
    j["version"] = kVersion;
    j["started"] = started;
    j["finished"] = finished;
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& [p, d] : outputs) outs.push_back({{"path", p}, {"sha256", d}});
    j["outputs"] = outs;
    return j.dump(2) + "\n";
}

std::string write_manifest(const std::string& out_dir, RunManifest& m) {
    m.finished = iso8601_now();
    std::string name = m.command;
    for (auto& c : name)
        if (c == ' ' || c == '/') c = '-';
    std::string path = out_dir.empty() ? ("manifest-" + name + ".json")
                                       : (out_dir + "/manifest-" + name + ".json");
    std::ofstream out(path);
    out << m.to_json_string();
    return path;
}

}  // namespace flatlab
