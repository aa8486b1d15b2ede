#ifndef UBL_ARTIFACTS_HPP
#define UBL_ARTIFACTS_HPP

#include <cstdint>
#include <map>
#include <string>

namespace ubl {

// Run manifest: config hash, seed, wall time, and one FNV-1a hash per
// artifact. Re-running a config must byte-reproduce every artifact (the wall
// time is metadata and excluded from comparisons).
struct RunManifest {
    std::string config_hash;
    std::uint64_t seed = 0;
    double wall_ms = 0.0;
    std::map<std::string, std::string> artifact_hashes;
};

std::string file_hash_hex(const std::string& path);
void add_artifact(RunManifest& m, const std::string& path);
void write_manifest(const RunManifest& m, const std::string& path);

// Creates the directory (and parents) if needed; returns the path.
std::string ensure_dir(const std::string& path);

}  // namespace ubl

#endif
