#include "fastslow/lab/output.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <chrono>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "fastslow/errors.hpp"

namespace fastslow::lab {

const char* const kVersion = "1.0.0";

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

std::string format_csv_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  row_text(header);
}

void CsvWriter::row_text(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::logic_error("CSV row width does not match header in " + path_.string());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_csv_real(v));
  row_text(cells);
}

void CsvWriter::row(const std::string& label, const std::vector<double>& values) {
  std::vector<std::string> cells{label};
  for (double v : values) cells.push_back(format_csv_real(v));
  row_text(cells);
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256 initialisation failed");
  }
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

RunRecorder::RunRecorder(const RunConfig& cfg, std::string command)
    : cfg_(cfg), command_(std::move(command)), dir_(cfg.output_directory), started_(now_seconds()) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir_.string() + "': " + ec.message());
}

void RunRecorder::emitted(const std::filesystem::path& path) { files_.push_back(path); }

std::vector<ManifestEntry> RunRecorder::finish(int exit_code) {
  std::vector<ManifestEntry> entries;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& f : files_) {
    ManifestEntry e;
    e.file = std::filesystem::relative(f, dir_).generic_string();
    e.size = std::filesystem::file_size(f);
    e.sha256 = sha256_file(f);
    files.push_back({{"file", e.file}, {"size", e.size}, {"sha256", e.sha256}});
    entries.push_back(e);
  }
  nlohmann::ordered_json m;
  m["command"] = command_;
  m["version"] = kVersion;
  m["exit_code"] = exit_code;
  m["wall_clock_seconds"] = now_seconds() - started_;
  m["config"] = serialize_config(cfg_);
  m["files"] = files;
  std::ofstream out(dir_ / ("manifest-" + command_ + ".json"));
  out << m.dump(2) << '\n';
  return entries;
}

std::string epsilon_tag(double epsilon) { return format_real(epsilon); }

}  // namespace fastslow::lab
