#pragma once

// Artifact writers. Every file carries the code version, the config hash and
// the seed so that an output can be traced back to the run that made it.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace wqc::cli {

[[nodiscard]] std::string version_string();

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  nlohmann::json config;
};

/// Numbers with 17 significant digits, enough to round-trip; trailing zeros dropped.
[[nodiscard]] std::string format_number(double v);

/// CSV table. The first line is a comment with the provenance, then the header.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const Provenance& prov,
            const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void close();
  ~CsvWriter();

  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

 private:
  std::filesystem::path path_;
  std::string buffer_;
  std::size_t columns_;
  bool closed_ = false;
};

/// Writes `body` with a "provenance" member added.
void write_json(const std::filesystem::path& path, nlohmann::json body, const Provenance& prov);

/// Raw little-endian float64 values in column-major order, plus `<path>.json`
/// describing rows, cols and provenance.
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m, const Provenance& prov);

/// Reads a matrix written by write_matrix.
[[nodiscard]] Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

}  // namespace wqc::cli
