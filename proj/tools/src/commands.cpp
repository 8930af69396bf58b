#include "wqc/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "wqc/classical.hpp"
#include "wqc/cli/io.hpp"
#include "wqc/error.hpp"
#include "wqc/response.hpp"
#include "wqc/stats.hpp"

namespace wqc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Provenance provenance(const RunConfig& c) { return {config_hash(c), c.seed, to_json(c)}; }

json params_json(const BilliardParams& p) {
  return {{"Lx", p.Lx},
          {"Ly", p.Ly},
          {"R", p.integrable() ? json("inf") : json(p.R)},
          {"eps", p.eps},
          {"mass", p.mass},
          {"energy", p.energy},
          {"gamma0", p.gamma0}};
}

json scales_json(const ScaleSet& s) {
  return {{"vE", s.vE},       {"kE", s.kE},         {"hbar_eff", s.hbar_eff}, {"u", s.u},
          {"tL", s.tL},       {"tR", s.integrable ? json("inf") : json(s.tR)},
          {"DeltaL", s.DeltaL}, {"DeltaR", s.DeltaR}, {"Delta0", s.Delta0}, {"b", s.b}};
}

// Zero is written instead of NaN so that JSON stays valid; the caller flags it.
double finite_or_zero(double v) { return std::isfinite(v) ? v : 0.0; }

response::DrivingSpec driving_spec(const RunConfig& c, const ScaleSet& s) {
  response::DrivingSpec d;
  d.fdot_rms = c.driving.fdot_rms;
  d.omega_c = c.driving.omega_c ? *c.driving.omega_c : (s.integrable ? s.DeltaL : s.DeltaR);
  d.amplitude = c.driving.amplitude;
  return d;
}

}  // namespace

BilliardParams window_billiard(const RunConfig& c) {
  BilliardParams p = c.billiard;
  if (c.window.center) p.energy = *c.window.center;
  p.validate();
  return p;
}

BilliardParams sweep_billiard(const BilliardParams& base, double u, double hbar) {
  if (!(u > 0) || !(hbar > 0)) throw DomainError("sweep point: u and hbar must be positive");
  BilliardParams p = base;
  p.R = p.Ly / u;
  const double kE = 2.0 * kPi / (hbar * p.Lx);
  p.energy = kE * kE / (2.0 * p.mass);
  p.validate();
  return p;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(master) ^ index);
}

QuantumRun run_quantum(const BilliardParams& p, const WindowConfig& wc) {
  QuantumRun q;
  q.params = p;
  const auto w = quantum::SpectralWindow::around(p.energy, wc.levels, p, wc.buffer_fraction);
  quantum::DiagonalizeOptions opt;
  opt.recenter = wc.recenter;
  q.solution = quantum::build_and_diagonalize(w, p, opt);
  q.f = quantum::f_matrix(q.solution);
  q.X = q.f.intensity();
  q.analytics = quantum::window_analytics(w, p);
  return q;
}

double resolve_bc(const RunConfig& c, const BilliardParams& p, const Eigen::MatrixXd& X) {
  if (c.measures.b_c) return *c.measures.b_c;
  const auto s = derive_scales(p);
  switch (c.measures.bc_rule) {
    case BcRule::DeltaR: return std::max(1.0, s.b);
    case BcRule::Driving: return response::weight_from_driving(driving_spec(c, s), s.Delta0).b_c();
    case BcRule::Detect: break;
  }
  return measures::detect_bc(measures::band_profiles(X));
}

measures::MeasureReport run_measures(const RunConfig& c, const QuantumRun& q) {
  measures::MeasureOptions mo;
  mo.weight = c.measures.weight;
  mo.b_c = resolve_bc(c, q.params, q.X);
  mo.probe_fraction = c.measures.probe_fraction;
  return measures::measure_report(q.X, q.analytics.x_avg_inf, mo);
}

void cmd_classical_spectrum(const RunConfig& c, const fs::path& out) {
  const auto prov = provenance(c);
  const BilliardParams p = c.billiard;
  p.validate();
  const auto s = derive_scales(p);
  const auto mom = classical::analytic_moments(p);

  const auto seq = classical::simulate_trajectory(p, c.classical.piston_hits, c.seed);
  {
    CsvWriter csv(out / "collisions.csv", prov, {"t", "y", "theta", "impulse"});
    for (const auto& r : seq.records) csv.row({r.t, r.y, r.theta, classical::impulse(r, p)});
  }

  const auto grid = classical::FrequencyGrid::linspace(0.0, c.classical.omega_max * s.DeltaL,
                                                       c.classical.grid_points);
  classical::SpectrumOptions so;
  so.segments = c.classical.segments;
  const auto est = classical::spike_spectrum(seq, grid, so);
  {
    CsvWriter csv(out / "spectrum.csv", prov, {"omega", "omega_over_DeltaL", "C", "C_over_Cinf", "comb_over_Cinf"});
    for (std::size_t k = 0; k < est.values.size(); ++k) {
      const double w = est.omega_grid[k];
      csv.row({w, w / s.DeltaL, est.values[k], est.values[k] / mom.C_inf,
               classical::comb_spectrum(w, p) / mom.C_inf});
    }
  }

  // Plateau over the upper half of the grid, where the ballistic peaks have merged.
  double tail = 0;
  std::size_t n_tail = 0;
  for (std::size_t k = 0; k < est.values.size(); ++k)
    if (est.omega_grid[k] >= 0.5 * c.classical.omega_max * s.DeltaL) {
      tail += est.values[k];
      ++n_tail;
    }
  tail /= static_cast<double>(std::max<std::size_t>(n_tail, 1));

  // Counting windows are measured in tR, or in tL for the flat box.
  const double t_unit = s.integrable ? s.tL : s.tR;
  json nv = json::array();
  for (double tw : c.classical.count_windows) {
    json entry{{"window", tw}, {"window_time", tw * t_unit}};
    try {
      entry["c0_over_Cinf"] = classical::number_variance_c0(seq, tw * t_unit) / mom.C_inf;
    } catch (const DomainError& e) {
      entry["c0_over_Cinf"] = nullptr;
      entry["skipped"] = e.what();
    }
    nv.push_back(entry);
  }

  json body{{"params", params_json(p)},
            {"scales", scales_json(s)},
            {"piston_hits", seq.records.size()},
            {"t_total", seq.t_total},
            {"C_inf", mom.C_inf},
            {"tail_plateau_over_Cinf", tail / mom.C_inf},
            {"count_window_unit", s.integrable ? "tL" : "tR"},
            {"number_variance", nv}};
  // Without a background rate the zero-frequency enhancement diverges.
  if (!s.integrable && p.gamma0 > 0) {
    const auto gc = classical::gc_classical(p);
    body["g_c_classical"] = finite_or_zero(gc.value);
    if (gc.warning) body["warnings"].push_back(*gc.warning);
  }
  write_json(out / "classical.json", body, prov);
}

void cmd_quantum_solve(const RunConfig& c, const fs::path& out) {
  const auto prov = provenance(c);
  const auto p = window_billiard(c);
  const auto q = run_quantum(p, c.window);
  const auto& sol = q.solution;
  const double d0 = mean_level_spacing(sol.reference);

  const Eigen::VectorXd E = sol.eigenvalues();
  const Eigen::MatrixXd V = sol.eigenvectors();
  {
    CsvWriter csv(out / "eigenvalues.csv", prov, {"index", "E", "pn", "width"});
    for (Eigen::Index i = 0; i < E.size(); ++i) {
      const Eigen::VectorXd v = V.col(i);
      csv.row({static_cast<double>(static_cast<Eigen::Index>(sol.first) + i), E(i),
               quantum::participation_number(v), quantum::energy_width(v, sol.basis, d0)});
    }
  }
  {
    CsvWriter csv(out / "basis.csv", prov, {"index", "nx", "ny", "E0"});
    for (std::size_t i = 0; i < sol.basis.size(); ++i) {
      const auto& b = sol.basis[i];
      csv.row({static_cast<double>(i), static_cast<double>(b.nx), static_cast<double>(b.ny), b.energy});
    }
  }
  write_matrix(out / "fmatrix.bin", q.f.values, prov);
  write_matrix(out / "eigenvectors.bin", V, prov);

  const auto st = quantum::state_statistics(sol);
  const auto sr = quantum::sum_rule_check(sol);
  const auto& wa = q.analytics;
  json qd = json::array();
  for (const auto& [a, b] : sol.quasi_degenerate) qd.push_back({a, b});
  json body{{"params", params_json(p)},
            {"reference", params_json(sol.reference)},
            {"scales", scales_json(derive_scales(p))},
            {"window", {{"E_lo", sol.window.E_lo}, {"E_hi", sol.window.E_hi}, {"buffer", sol.window.buffer}}},
            {"dimension", sol.basis.size()},
            {"window_states", sol.count},
            {"first_index", sol.first},
            {"mean_pn", st.mean_pn},
            {"mean_width", st.mean_width},
            {"sum_rule", {{"max_row_error", sr.max_row_error}, {"frobenius_error", sr.frobenius_error}}},
            {"p0", {{"p0", wa.p0},
                    {"p0_log", wa.p0_log},
                    {"p0_shell", wa.p0_shell},
                    {"enumerated", quantum::enumerate_p0(sol.window, sol.reference)}}},
            {"x_avg_inf", wa.x_avg_inf},
            {"quasi_degenerate", qd},
            {"warnings", sol.warnings}};
  write_json(out / "quantum.json", body, prov);
}

void cmd_measures(const RunConfig& c, const fs::path& out) {
  const auto prov = provenance(c);
  const auto p = window_billiard(c);
  const auto q = run_quantum(p, c.window);
  const auto rep = run_measures(c, q);
  const auto s = derive_scales(p);

  {
    // Classical reference on the level-offset axis: C(omega) Delta0 / 2 pi at omega = r Delta0.
    // The impulse train is taken from a short trajectory of the same billiard.
    const auto seq = classical::simulate_trajectory(p, c.classical.piston_hits, c.seed);
    const auto& prof = rep.profile;
    std::vector<double> omega;
    for (int r : prof.r) omega.push_back(r * s.Delta0);
    classical::FrequencyGrid grid{omega.empty() ? 0.0 : omega.front(), s.Delta0, omega.size()};
    classical::SpectrumOptions so;
    so.segments = c.classical.segments;
    const auto est = classical::spike_spectrum(seq, grid, so);
    CsvWriter csv(out / "bandprofile.csv", prov, {"r", "mean", "median", "classical_reference"});
    for (std::size_t i = 0; i < prof.r.size(); ++i)
      csv.row({static_cast<double>(prof.r[i]), prof.mean_values[i], prof.median_values[i],
               est.values[i] * s.Delta0 / (2.0 * kPi)});
  }

  json body{{"params", params_json(p)},
            {"weight", std::string(measures::to_string(c.measures.weight))},
            {"b_c", rep.b_c},
            {"bc_rule", c.measures.b_c ? "explicit" : std::string(to_string(c.measures.bc_rule))},
            {"s", rep.s},
            {"g_c", rep.g.g_c},
            {"g_s", rep.g.g_s},
            {"g", rep.g.g},
            {"g_vrh", rep.g_vrh},
            {"g_vrh_raw", rep.g_vrh_raw},
            {"algebraic", rep.g.algebraic},
            {"network", rep.g.network},
            {"x_avg_inf", q.analytics.x_avg_inf},
            {"g_s_theory", measures::gs_theory(s.u, s.hbar_eff, c.measures.alpha)},
            {"bounds", {{"harmonic", rep.bounds.harmonic},
                        {"geometric", rep.bounds.geometric},
                        {"median", rep.bounds.median}}},
            {"warnings", rep.warnings}};
  write_json(out / "measures.json", body, prov);
}

void cmd_stats(const RunConfig& c, const fs::path& out) {
  const auto prov = provenance(c);
  const auto p = window_billiard(c);
  const auto q = run_quantum(p, c.window);
  const auto& sol = q.solution;
  const double d0 = mean_level_spacing(sol.reference);
  json warnings = json::array();

  const Eigen::VectorXd E = sol.eigenvalues();
  stats::SpacingOptions so;
  so.min_spacing = c.stats.min_spacing;
  const auto S = stats::spacings(std::span<const double>(E.data(), static_cast<std::size_t>(E.size())), d0, so);
  json brody = nullptr;
  if (S.size() >= 200) {
    const auto fit = stats::brody_fit(S);
    brody = {{"q", fit.q}, {"slope", fit.slope}, {"intercept", fit.intercept}, {"points", fit.points}};
    CsvWriter csv(out / "brody_T.csv", prov, {"x", "T"});
    for (std::size_t i = 0; i < fit.x.size(); ++i) csv.row({fit.x[i], fit.T[i]});
    const auto cdf = stats::empirical_cdf(S);
    CsvWriter sp(out / "spacings.csv", prov, {"S", "empirical_cdf", "brody_cdf"});
    for (std::size_t i = 0; i < cdf.x.size(); ++i)
      sp.row({cdf.x[i], cdf.F[i], stats::brody_cdf(cdf.x[i], std::clamp(fit.q, 0.0, 1.0))});
  } else {
    warnings.push_back("Brody fit skipped: " + std::to_string(S.size()) + " spacings, need 200");
    const auto cdf = stats::empirical_cdf(S);
    CsvWriter sp(out / "spacings.csv", prov, {"S", "empirical_cdf"});
    for (std::size_t i = 0; i < cdf.x.size(); ++i) sp.row({cdf.x[i], cdf.F[i]});
  }

  const auto I = stats::intensity(q.f.values.diagonal(), q.f.energies);
  {
    const auto cdf = stats::empirical_cdf(I);
    CsvWriter csv(out / "intensity.csv", prov, {"I", "cumulative_fraction"});
    for (std::size_t i = 0; i < cdf.x.size(); ++i) csv.row({cdf.x[i], cdf.F[i]});
  }

  const double bc = resolve_bc(c, p, q.X);
  const measures::BandWeight w(c.measures.weight, std::max(1.0, bc));
  const auto h = stats::element_histogram(q.X, w, c.stats.histogram_bins);
  {
    CsvWriter csv(out / "element_hist.csv", prov, {"lnX_lo", "lnX_hi", "count"});
    for (std::size_t k = 0; k < h.counts.size(); ++k)
      csv.row({h.edges[k], h.edges[k + 1], static_cast<double>(h.counts[k])});
  }

  double mean_s = 0;
  for (double v : S) mean_s += v;
  if (!S.empty()) mean_s /= static_cast<double>(S.size());
  json body{{"params", params_json(p)},
            {"spacings", S.size()},
            {"mean_spacing", mean_s},
            {"brody", brody},
            {"intensity_ks_to_normal", I.size() >= 2 ? json(stats::ks_distance_to_normal(I)) : json(nullptr)},
            {"histogram", {{"b_c", w.b_c()}, {"underflow", h.underflow}, {"total", h.total}}},
            {"warnings", warnings}};
  write_json(out / "stats.json", body, prov);
}

void cmd_ear(const RunConfig& c, const fs::path& out) {
  const auto prov = provenance(c);
  const auto p = window_billiard(c);
  const auto s = derive_scales(p);
  const auto d = driving_spec(c, s);

  double g_c = 0, g_s = 0;
  std::string source = "config";
  if (c.driving.g_c && c.driving.g_s) {
    g_c = *c.driving.g_c;
    g_s = *c.driving.g_s;
  } else {
    const auto q = run_quantum(p, c.window);
    measures::NetworkOptions no;
    no.probe_fraction = c.measures.probe_fraction;
    const auto r = measures::g_report(q.X, response::weight_from_driving(d, s.Delta0), q.analytics.x_avg_inf, no);
    g_c = r.g_c;
    g_s = r.g_s;
    source = "quantum window";
  }

  const auto rep = response::ear_report(p, c.driving.temperature, d, g_c, g_s);
  json body{{"params", params_json(p)},
            {"driving", {{"fdot_rms", d.fdot_rms}, {"omega_c", d.omega_c}, {"amplitude", d.amplitude}}},
            {"measures_source", source},
            {"g_c", g_c},
            {"g_s", g_s},
            {"T", rep.T},
            {"G0", rep.G0},
            {"G_lrt", rep.G_lrt},
            {"G_slrt", rep.G_slrt},
            {"D", rep.D},
            {"Edot_lrt", rep.Edot_lrt},
            {"Edot_slrt", rep.Edot_slrt},
            {"dimensionless_ear", rep.dimensionless_ear},
            {"D_over_delta0_cubed", rep.D_over_delta0_cubed},
            {"fgr_ok_power2", rep.fgr2.ok},
            {"fgr_margin_power2", finite_or_zero(rep.fgr2.margin)},
            {"fgr_ok_power3", rep.fgr3.ok},
            {"fgr_margin_power3", finite_or_zero(rep.fgr3.margin)},
            {"amplitude_window", {{"a2_min", rep.amplitude_window.a2_min},
                                  {"a2_max", rep.amplitude_window.a2_max},
                                  {"empty", rep.amplitude_window.empty()}}},
            {"warnings", rep.warnings}};
  write_json(out / "ear.json", body, prov);
}

SweepRow sweep_point(const RunConfig& c, double u, double hbar, std::uint64_t seed) {
  const auto p = sweep_billiard(c.billiard, u, hbar);
  WindowConfig wc = c.window;
  wc.center.reset();
  const auto q = run_quantum(p, wc);
  const auto rep = run_measures(c, q);
  const auto s = derive_scales(p);

  const measures::BandWeight w(c.measures.weight, rep.b_c);
  measures::NetworkOptions no;
  no.probe_fraction = c.measures.probe_fraction;
  const auto utx = measures::g_report(measures::untexture(q.X, seed), w, q.analytics.x_avg_inf, no);
  const auto ear = response::ear_report(p, c.driving.temperature, driving_spec(c, s), rep.g.g_c, rep.g.g_s);

  SweepRow r;
  r.u = u;
  r.hbar = hbar;
  r.E = p.energy;
  r.dim = static_cast<double>(q.solution.basis.size());
  r.b_c = rep.b_c;
  r.s = rep.s;
  r.g_c = rep.g.g_c;
  r.g_s = rep.g.g_s;
  r.g = rep.g.g;
  r.g_vrh = rep.g_vrh;
  r.g_s_untextured = utx.g_s;
  r.G_lrt_over_G0 = ear.G_lrt / ear.G0;
  r.G_slrt_over_G0 = ear.G_slrt / ear.G0;
  return r;
}

void cmd_sweep(const RunConfig& c, const fs::path& out) {
  if (c.sweep.u.empty()) throw ConfigError({"sweep.u: must list at least one deformation"});
  const auto prov = provenance(c);
  std::vector<double> hbars = c.sweep.hbar;
  if (hbars.empty()) hbars.push_back(derive_scales(c.billiard).hbar_eff);

  struct Point {
    double u, hbar;
  };
  std::vector<Point> points;
  for (double h : hbars)
    for (double u : c.sweep.u) points.push_back({u, h});

  std::vector<SweepRow> rows(points.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        rows[i] = sweep_point(c, points[i].u, points[i].hbar, derive_seed(c.seed, i));
      } catch (...) {
        std::lock_guard lock(failure_lock);
        if (!failure) failure = std::current_exception();
        next = points.size();
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(c.jobs, static_cast<unsigned>(points.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  CsvWriter csv(out / "sweep.csv", prov,
                {"u", "hbar", "E", "dim", "b_c", "s", "g_c", "g_s", "g", "g_vrh", "g_s_untextured",
                 "G_lrt_over_G0", "G_slrt_over_G0", "g_s_theory"});
  for (const auto& r : rows)
    csv.row({r.u, r.hbar, r.E, r.dim, r.b_c, r.s, r.g_c, r.g_s, r.g, r.g_vrh, r.g_s_untextured,
             r.G_lrt_over_G0, r.G_slrt_over_G0, measures::gs_theory(r.u, r.hbar, c.measures.alpha)});
}

const std::vector<std::string_view>& subcommand_names() {
  static const std::vector<std::string_view> names{"classical-spectrum", "quantum-solve", "measures",
                                                   "stats", "ear", "sweep"};
  return names;
}

std::string_view subcommand_summary(std::string_view name) {
  if (name == "classical-spectrum") return "piston collisions and the classical power spectrum";
  if (name == "quantum-solve") return "eigenstates of the truncated model and the force matrix";
  if (name == "measures") return "bandprofile, sparsity and the algebraic and network averages";
  if (name == "stats") return "level spacings, Brody fit, intensities and element histograms";
  if (name == "ear") return "absorption coefficients for the configured driving";
  if (name == "sweep") return "g_c, g_s and g over a grid of (u, hbar) points";
  return "";
}

void run_subcommand(std::string_view name, const RunConfig& c, const fs::path& out) {
  fs::create_directories(out);
  write_json(out / "config.resolved.json", to_json(c), provenance(c));
  if (name == "classical-spectrum") cmd_classical_spectrum(c, out);
  else if (name == "quantum-solve") cmd_quantum_solve(c, out);
  else if (name == "measures") cmd_measures(c, out);
  else if (name == "stats") cmd_stats(c, out);
  else if (name == "ear") cmd_ear(c, out);
  else if (name == "sweep") cmd_sweep(c, out);
  else throw ConfigError({"unknown subcommand '" + std::string(name) + "'"});
}

}  // namespace wqc::cli
