#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fastslow/lab/config.hpp"

namespace fastslow::lab {

/// Double in CSV form: 17 significant digits.
std::string format_csv_real(double v);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void row(const std::vector<double>& values);
  /// A leading text column followed by numeric columns.
  void row(const std::string& label, const std::vector<double>& values);
  void row_text(const std::vector<std::string>& cells);

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
};

std::string sha256_file(const std::filesystem::path& path);

struct ManifestEntry {
  std::string file;  // relative to the output directory
  std::uintmax_t size = 0;
  std::string sha256;
};

/// Tracks emitted files for a command and writes manifest.json next to them.
class RunRecorder {
 public:
  RunRecorder(const RunConfig& cfg, std::string command);

  const std::filesystem::path& directory() const { return dir_; }
  std::filesystem::path file(const std::string& name) const { return dir_ / name; }
  void emitted(const std::filesystem::path& path);
  /// Writes manifest-<command>.json with the config echo, checksums and elapsed wall-clock time.
  std::vector<ManifestEntry> finish(int exit_code);

 private:
  RunConfig cfg_;
  std::string command_;
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> files_;
  double started_ = 0.0;
};

/// File-name-safe rendering of an epsilon value (e.g. 0.005 -> "0.005").
std::string epsilon_tag(double epsilon);

extern const char* const kVersion;

}  // namespace fastslow::lab
