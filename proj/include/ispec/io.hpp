#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace ispec {

// CSV with a header row, '.' decimal separator, shortest-roundtrip doubles;
// byte-deterministic for identical inputs.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<double>& values);
  void row_mixed(const std::vector<std::string>& values);
  void save(const std::filesystem::path& path) const;
  static std::string format(double v);

 private:
  std::string body_;
  std::size_t columns_;
};

// Columnwise CSV reader (numeric cells only).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
  static CsvTable load(const std::filesystem::path& path);
  const std::vector<double>& column(const std::string& name) const;
};

// FNV-1a over a canonical string
std::uint64_t fnv1a(const std::string& s);

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kManifestName = "run_manifest.json";

// Per-run manifest: config hash, tool version, stage verdicts, emitted files.
struct RunManifest {
  std::string config_hash;
  std::string version = kToolVersion;
  std::map<std::string, std::string> stages;  // stage -> PASS / FAIL / SKIP
  std::vector<std::string> files;

  void record_file(const std::string& name);
  void save(const std::filesystem::path& out_dir) const;
  static RunManifest load(const std::filesystem::path& out_dir);
  static RunManifest load_or_create(const std::filesystem::path& out_dir,
                                    const std::string& config_hash);
};

}  // namespace ispec
