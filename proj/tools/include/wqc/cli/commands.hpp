#pragma once

// Subcommand pipelines of the wqc tool. Each writes its artifacts into the
// output directory and returns normally; module errors propagate as
// exceptions and are mapped to exit codes by the caller.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "wqc/cli/config.hpp"
#include "wqc/measures.hpp"
#include "wqc/quantum.hpp"

namespace wqc::cli {

/// Billiard of the run with its energy moved to the window centre.
[[nodiscard]] BilliardParams window_billiard(const RunConfig& c);

/// Billiard of one sweep point: R = Ly / u and E chosen so that hbar_eff = hbar.
[[nodiscard]] BilliardParams sweep_billiard(const BilliardParams& base, double u, double hbar);

/// Per-point seed derived from the master seed by SplitMix64 mixing.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

struct QuantumRun {
  BilliardParams params;
  quantum::EigenSolution solution;
  quantum::FMatrix f;
  Eigen::MatrixXd X;
  quantum::WindowAnalytics analytics;
};

[[nodiscard]] QuantumRun run_quantum(const BilliardParams& p, const WindowConfig& w);

/// b_c from the explicit override or the configured rule.
[[nodiscard]] double resolve_bc(const RunConfig& c, const BilliardParams& p, const Eigen::MatrixXd& X);

[[nodiscard]] measures::MeasureReport run_measures(const RunConfig& c, const QuantumRun& q);

struct SweepRow {
  double u = 0;
  double hbar = 0;
  double E = 0;
  double dim = 0;
  double b_c = 0;
  double s = 0;
  double g_c = 0;
  double g_s = 0;
  double g = 0;
  double g_vrh = 0;
  double g_s_untextured = 0;
  double G_lrt_over_G0 = 0;
  double G_slrt_over_G0 = 0;
};

[[nodiscard]] SweepRow sweep_point(const RunConfig& c, double u, double hbar, std::uint64_t seed);

void cmd_classical_spectrum(const RunConfig& c, const std::filesystem::path& out);
void cmd_quantum_solve(const RunConfig& c, const std::filesystem::path& out);
void cmd_measures(const RunConfig& c, const std::filesystem::path& out);
void cmd_stats(const RunConfig& c, const std::filesystem::path& out);
void cmd_ear(const RunConfig& c, const std::filesystem::path& out);
void cmd_sweep(const RunConfig& c, const std::filesystem::path& out);

[[nodiscard]] const std::vector<std::string_view>& subcommand_names();
[[nodiscard]] std::string_view subcommand_summary(std::string_view name);

/// Runs one subcommand after writing the resolved configuration echo.
void run_subcommand(std::string_view name, const RunConfig& c, const std::filesystem::path& out);

}  // namespace wqc::cli
