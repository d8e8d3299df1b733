#include "ttslat/io.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "ttslat/errors.hpp"

namespace ttslat {

using nlohmann::json;

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) {
    return "0";
  }
  return std::string(buf, ptr);
}

void atomic_write_file(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path dir = target.parent_path();
  if (!dir.empty()) {
    std::error_code ec;
    fs::create_directories(dir, ec);
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw ParseError("cannot open file for writing: " + tmp.string());
    }
    out << contents;
    if (!out) {
      throw ParseError("short write to: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    throw ParseError("cannot rename " + tmp.string() + " to " + path + ": " +
                     ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open file: " + path);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string serialize_manifest(const RunManifest& m) {
  json params = json::object();
  for (const auto& [k, v] : m.parameters) params[k] = v;
  json j{{"command", m.command},
         {"scenario_path", m.scenario_path},
         {"parameters", params},
         {"output_paths", m.output_paths},
         {"tool_version", m.tool_version},
         {"seed", m.seed}};
  return j.dump(2) + "\n";
}

RunManifest parse_manifest(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("manifest is not valid JSON: ") + e.what());
  }
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.scenario_path = j.at("scenario_path").get<std::string>();
  for (const auto& item : j.at("parameters").items()) {
    m.parameters.emplace_back(item.key(), item.value().get<std::string>());
  }
  m.output_paths = j.at("output_paths").get<std::vector<std::string>>();
  m.tool_version = j.at("tool_version").get<std::string>();
  m.seed = j.at("seed").get<uint64_t>();
  return m;
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  atomic_write_file(path, serialize_manifest(manifest));
}

unsigned env_thread_cap() {
  const char* v = std::getenv("TTSLAT_THREADS");
  if (!v || !*v) return 0;
  char* end = nullptr;
  long n = std::strtol(v, &end, 10);
  if (end == v || n < 1) return 0;
  return static_cast<unsigned>(n);
}

}  // namespace ttslat
