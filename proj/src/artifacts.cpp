#include "ubl/artifacts.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ubl/common.hpp"
#include "ubl/measures.hpp"

namespace ubl {

std::string file_hash_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DiagnosticError("file_hash_hex: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(ss.str())));
    return buf;
}

void add_artifact(RunManifest& m, const std::string& path) {
    m.artifact_hashes[std::filesystem::path(path).filename().string()] = file_hash_hex(path);
}

void write_manifest(const RunManifest& m, const std::string& path) {
    nlohmann::json j;
    j["config_hash"] = m.config_hash;
    j["seed"] = m.seed;
    j["wall_ms"] = m.wall_ms;
    j["artifacts"] = m.artifact_hashes;
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

std::string ensure_dir(const std::string& path) {
    std::filesystem::create_directories(path);
    return path;
}

}  // namespace ubl
