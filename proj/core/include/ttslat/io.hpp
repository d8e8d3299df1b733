#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ttslat {

// Shortest decimal representation that round-trips the exact double.
std::string format_double(double value);

// Writes via a temp file in the same directory, then renames into place.
void atomic_write_file(const std::string& path, const std::string& contents);

std::string read_file(const std::string& path);

// Provenance record written alongside every CLI output; re-running the
// recorded command reproduces deterministic outputs byte-identically.
struct RunManifest {
  std::string command;
  std::string scenario_path;
  std::vector<std::pair<std::string, std::string>> parameters;  // ordered
  std::vector<std::string> output_paths;
  std::string tool_version;
  uint64_t seed = 0;
};

std::string serialize_manifest(const RunManifest& manifest);
RunManifest parse_manifest(const std::string& json_text);
void write_manifest(const RunManifest& manifest, const std::string& path);

// Worker cap from the TTSLAT_THREADS environment variable; 0 when unset.
unsigned env_thread_cap();

}  // namespace ttslat
