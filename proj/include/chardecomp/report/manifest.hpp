#pragma once

#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "chardecomp/error.hpp"
#include "chardecomp/models/model_io.hpp"
#include "chardecomp/version.hpp"

namespace chardecomp::report {

/// Everything needed to rerun a command: no timestamps or host details, so
/// equal manifests mean equal outputs.
struct RunManifest {
    std::string subcommand;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> inputs;  // path, digest
    std::string version = kVersion;
};

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return "fnv1a64:" + hex64(fnv1a64(bytes));
}

inline nlohmann::ordered_json manifest_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["tool"] = "chardecomp";
    j["version"] = m.version;
    j["subcommand"] = m.subcommand;
    j["seed"] = m.seed;
    j["config"] = m.config;
    nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
    for (const auto& [path, digest] : m.inputs) inputs.push_back({{"path", path}, {"digest", digest}});
    j["inputs"] = inputs;
    return j;
}

inline void write_manifest(const RunManifest& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << manifest_json(m).dump(2) << '\n';
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace chardecomp::report
