#include "wqc/cli/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <stdexcept>

#include "wqc/cli/version.hpp"

namespace wqc::cli {

namespace fs = std::filesystem;

std::string version_string() { return kVersion; }

std::string format_number(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("format_number: conversion failed");
  return {buf.data(), end};
}

namespace {

void write_file(const fs::path& path, const std::string& text, std::ios::openmode mode = {}) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::out | std::ios::trunc | mode);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

nlohmann::json provenance_json(const Provenance& prov) {
  return {{"version", version_string()},
          {"config_hash", prov.config_hash},
          {"seed", prov.seed},
          {"config", prov.config}};
}

}  // namespace

CsvWriter::CsvWriter(const fs::path& path, const Provenance& prov,
                     const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
  buffer_ = "# wqc " + version_string() + " config=" + prov.config_hash +
            " seed=" + std::to_string(prov.seed) + "\n";
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += header[i];
  }
  buffer_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw std::logic_error("CsvWriter: row width differs from header");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += format_number(values[i]);
  }
  buffer_ += '\n';
}

void CsvWriter::close() {
  if (closed_) return;
  closed_ = true;
  write_file(path_, buffer_);
}

CsvWriter::~CsvWriter() {
  try {
    close();
  } catch (...) {
  }
}

void write_json(const fs::path& path, nlohmann::json body, const Provenance& prov) {
  body["provenance"] = provenance_json(prov);
  write_file(path, body.dump(2) + "\n");
}

void write_matrix(const fs::path& path, const Eigen::MatrixXd& m, const Provenance& prov) {
  std::string bytes(reinterpret_cast<const char*>(m.data()),
                    static_cast<std::size_t>(m.size()) * sizeof(double));
  write_file(path, bytes, std::ios::binary);
  nlohmann::json meta{{"file", path.filename().string()},
                      {"rows", m.rows()},
                      {"cols", m.cols()},
                      {"dtype", "float64"},
                      {"byte_order", "little"},
                      {"layout", "column-major"}};
  write_json(fs::path(path.string() + ".json"), std::move(meta), prov);
}

Eigen::MatrixXd read_matrix(const fs::path& path) {
  std::ifstream meta_in(path.string() + ".json");
  if (!meta_in) throw std::runtime_error("missing sidecar for '" + path.string() + "'");
  const auto meta = nlohmann::json::parse(meta_in);
  const auto rows = meta.at("rows").get<Eigen::Index>();
  const auto cols = meta.at("cols").get<Eigen::Index>();
  Eigen::MatrixXd m(rows, cols);
  std::ifstream in(path, std::ios::binary);
  in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!in) throw std::runtime_error("short read from '" + path.string() + "'");
  return m;
}

}  // namespace wqc::cli
