#include "ispec/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ispec/errors.hpp"

namespace ispec {

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) body_ += ',';
    body_ += header[i];
  }
  body_ += '\n';
}

std::string CsvWriter::format(double v) {
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) body_ += ',';
    body_ += format(values[i]);
  }
  body_ += '\n';
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) body_ += ',';
    body_ += values[i];
  }
  body_ += '\n';
}

void CsvWriter::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << body_;
}

CsvTable CsvTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("missing file " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw Error("empty csv " + path.string());
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) t.header.push_back(cell);
  t.columns.resize(t.header.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::size_t c = 0;
    while (std::getline(ls, cell, ',') && c < t.columns.size()) t.columns[c++].push_back(std::stod(cell));
  }
  return t;
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return columns[i];
  throw Error("csv column not found: " + name);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void RunManifest::record_file(const std::string& name) {
  for (auto& f : files)
    if (f == name) return;
  files.push_back(name);
}

void RunManifest::save(const std::filesystem::path& out_dir) const {
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["version"] = version;
  j["stages"] = stages;
  auto sorted = files;
  std::sort(sorted.begin(), sorted.end());
  j["files"] = sorted;
  std::ofstream out(out_dir / kManifestName, std::ios::binary);
  if (!out) throw Error("cannot write manifest in " + out_dir.string());
  out << j.dump(2) << '\n';
}

RunManifest RunManifest::load(const std::filesystem::path& out_dir) {
  std::ifstream in(out_dir / kManifestName);
  if (!in) throw MissingArtifact("no manifest in " + out_dir.string());
  RunManifest m;
  try {
    nlohmann::json j = nlohmann::json::parse(in);
    m.config_hash = j.at("config_hash").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.stages = j.at("stages").get<std::map<std::string, std::string>>();
    m.files = j.at("files").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("corrupt manifest: ") + e.what());
  }
  return m;
}

RunManifest RunManifest::load_or_create(const std::filesystem::path& out_dir,
                                        const std::string& config_hash) {
  if (std::filesystem::exists(out_dir / kManifestName)) {
    RunManifest m = load(out_dir);
    if (m.config_hash != config_hash)
      throw ConfigError("output directory holds a run with a different config");
    return m;
  }
  RunManifest m;
  m.config_hash = config_hash;
  m.record_file(kManifestName);
  return m;
}

}  // namespace ispec
