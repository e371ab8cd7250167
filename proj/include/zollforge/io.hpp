#pragma once
// Canonical JSON (sorted keys, reals as %.12e) and run manifests with SHA-256
// content hashes.

#include <chrono>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace zf::io {

using Json = nlohmann::json;  // std::map backed, so keys come out sorted

std::string format_real(double x);
std::string canonical_dump(const Json& j, int indent = 2);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

// writes text to path and returns its hash; throws Io on failure
std::string write_file(const std::string& path, const std::string& text);
std::string read_file(const std::string& path);

class RunManifest {
 public:
  explicit RunManifest(std::string command);
  void set_config(Json config) { config_ = std::move(config); }
  void add_input(const std::string& name, const std::string& content);
  void add_output(const std::string& path);  // hashed from disk
  void stage(const std::string& name, double seconds) { stages_.emplace_back(name, seconds); }
  Json to_json() const;
  // manifest.json in dir
  void write(const std::string& dir) const;

 private:
  std::string command_;
  Json config_ = Json::object();
  std::map<std::string, std::string> inputs_, outputs_;
  std::vector<std::pair<std::string, double>> stages_;
  std::chrono::steady_clock::time_point start_;
  std::string started_at_;
};

}  // namespace zf::io
