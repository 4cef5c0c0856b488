#include "eit/cli/commands.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <system_error>

#include "eit/lambda.hpp"
#include "eit/master_equation.hpp"
#include "eit/optics.hpp"
#include "eit/reduction.hpp"

namespace eit::cli {

using nlohmann::ordered_json;

namespace {

constexpr double kMaxReductionDeviation = 0.02;

ordered_json number_or_null(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json derived_of(const MaterialParams& mat) {
  ordered_json d;
  d["gamma32_rad_s"] = mat.gamma_between(3, 2);
  d["gamma52_rad_s"] = mat.gamma_between(5, 2);
  d["coupling_prefactor_rad_s"] = coupling_prefactor(mat);
  d["probe_omega_rad_s"] = mat.probe_omega();
  return d;
}

RunSummary start(const std::string& command, const RunContext& ctx, const MaterialParams& mat) {
  RunSummary s;
  s.command = command;
  s.resolved = ctx.config.resolved();
  s.derived = derived_of(mat);
  return s;
}

template <typename... Args>
void say(const RunContext& ctx, const Args&... args) {
  if (auto* os = ctx.log) {
    ((*os << args), ...);
    *os << '\n';
  }
}

// Absorption of the same material with the coupling switched off, from the
// closed form. The full model cannot supply this reference: without the
// coupling nothing repumps |2>.
double reference_alpha(const MaterialParams& mat) {
  const auto p = lambda_from_material(mat, 0.0);
  return absorption(chi_analytic(p, 0.0), mat.probe_wavelength_m);
}

struct VgResult {
  double v_g;
  double group_index;
  double n;
  double step;
};

VgResult compute_vg(const RunContext& ctx, const MaterialParams& mat) {
  const auto& cfg = ctx.config;
  IndexSampler sampler{cfg.backend, &mat, cfg.drive_set(), cfg.backend_options(1), cfg.probe.detuning};
  const double omega = sampler.omega_at_delta0();
  VgResult r{};
  r.step = cfg.fd_step_or_default();
  r.v_g = group_velocity(sampler, omega, r.step);
  r.n = sampler(omega);
  r.group_index = PhysicalConstants::c / r.v_g;
  return r;
}

Spectrum run_sweep(const RunContext& ctx, const MaterialParams& mat) {
  const auto& cfg = ctx.config;
  auto spectrum = sweep(cfg.backend, mat, cfg.drive_set(), cfg.grid(), cfg.backend_options(ctx.jobs));
  spectrum.params_digest = cfg.resolved().dump();
  return spectrum;
}

ordered_json window_json(const WindowReport& w) {
  ordered_json j;
  j["found"] = w.found;
  j["truncated"] = w.truncated;
  j["width_rad_s"] = w.width;
  j["width_hz"] = w.width_hz;
  j["edges_rad_s"] = {w.edges.first, w.edges.second};
  j["alpha_at_zero_per_m"] = w.alpha_at_zero;
  j["threshold_alpha_per_m"] = w.threshold_alpha;
  j["reference_alpha_per_m"] = w.reference_alpha;
  return j;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

DensityMatrix initial_state(const std::string& initial) {
  ComplexMatrix m = ComplexMatrix::Zero(6, 6);
  if (initial == "uniform") {
    m.diagonal().setConstant(1.0 / 6.0);
  } else {
    const int level = initial.back() - '0';
    m(level - 1, level - 1) = 1.0;
  }
  return assert_density_matrix(m);
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

ordered_json RunSummary::to_json() const {
  ordered_json j;
  j["command"] = command;
  j["exit_code"] = exit_code;
  j["resolved"] = resolved;
  j["derived"] = derived;
  j["headline"] = headline;
  j["wall_clock_s"] = wall_clock_s;
  return j;
}

RunSummary cmd_spectrum(const RunContext& ctx) {
  const auto mat = ctx.config.material();
  auto s = start("spectrum", ctx, mat);
  const auto spectrum = run_sweep(ctx, mat);
  write_atomic(ctx.out_dir / "spectrum.csv", spectrum.to_csv());
  write_atomic(ctx.out_dir / "spectrum.json", spectrum.to_json());

  const SpectrumRow* peak = &spectrum.rows.front();
  for (const auto& r : spectrum.rows) {
    if (r.alpha > peak->alpha) peak = &r;
  }
  s.headline["peak_alpha_per_m"] = peak->alpha;
  s.headline["peak_delta_rad_s"] = peak->delta;

  std::optional<double> alpha0, width;
  const auto& rows = spectrum.rows;
  if (rows.front().delta <= 0.0 && rows.back().delta >= 0.0) {
    const auto w = transparency_window(spectrum, reference_alpha(mat));
    alpha0 = w.alpha_at_zero;
    width = w.width;
  }
  s.headline["alpha_at_zero_per_m"] = number_or_null(alpha0);
  s.headline["window_width_rad_s"] = number_or_null(width);
  try {
    s.headline["v_g_m_s"] = compute_vg(ctx, mat).v_g;
  } catch (const DivergentVelocity&) {
    s.headline["v_g_m_s"] = nullptr;
  }

  say(ctx, "spectrum: ", rows.size(), " points, backend ", to_string(ctx.config.backend));
  say(ctx, "  peak alpha ", peak->alpha, " 1/m at delta = ", peak->delta, " rad/s");
  if (alpha0) say(ctx, "  alpha(0) ", *alpha0, " 1/m");
  return s;
}

RunSummary cmd_window(const RunContext& ctx) {
  const auto mat = ctx.config.material();
  auto s = start("window", ctx, mat);
  const auto spectrum = run_sweep(ctx, mat);
  const auto w = transparency_window(spectrum, reference_alpha(mat));
  const double at = autler_townes_separation(spectrum);

  auto j = window_json(w);
  j["autler_townes_separation_rad_s"] = at;
  j["closed_form_width_rad_s"] =
      window_width_closed_form(lambda_from_material(mat, std::abs(ctx.config.drive_set().coupling)));
  write_atomic(ctx.out_dir / "window.json", dump(j));

  s.headline["window_found"] = w.found;
  s.headline["window_width_rad_s"] = w.width;
  s.headline["window_width_hz"] = w.width_hz;
  s.headline["alpha_at_zero_per_m"] = w.alpha_at_zero;
  s.headline["reference_alpha_per_m"] = w.reference_alpha;

  if (w.found) {
    say(ctx, "window: width ", w.width, " rad/s (", w.width_hz, " Hz)", w.truncated ? ", truncated by grid" : "");
  } else {
    say(ctx, "window: no transparency window (alpha(0) above half the reference)");
  }
  return s;
}

RunSummary cmd_vg(const RunContext& ctx) {
  const auto mat = ctx.config.material();
  auto s = start("vg", ctx, mat);
  const auto r = compute_vg(ctx, mat);
  const bool anomalous = r.v_g < 0.0 || r.v_g > PhysicalConstants::c;

  ordered_json j;
  j["v_g_m_s"] = r.v_g;
  j["group_index"] = r.group_index;
  j["n"] = r.n;
  j["delta_rad_s"] = ctx.config.probe.detuning;
  j["fd_step_rad_s"] = r.step;
  j["anomalous"] = anomalous;
  if (ctx.config.backend == Backend::kAnalytic) {
    auto p = lambda_from_material(mat, std::abs(ctx.config.drive_set().coupling));
    p.gamma52 *= ctx.config.analytic_gamma52_factor;
    try {
      j["v_g_closed_form_m_s"] = group_velocity_analytic(p, mat, ctx.config.probe.detuning);
    } catch (const DivergentVelocity&) {
      j["v_g_closed_form_m_s"] = nullptr;
    }
  }
  write_atomic(ctx.out_dir / "vg.json", dump(j));

  s.headline["v_g_m_s"] = r.v_g;
  s.headline["group_index"] = r.group_index;
  s.headline["anomalous"] = anomalous;
  say(ctx, "vg: ", r.v_g, " m/s (group index ", r.group_index, ")");
  if (anomalous) say(ctx, "  warning: anomalous dispersion, v_g outside [0, c]");
  return s;
}

RunSummary cmd_validate(const RunContext& ctx) {
  const auto& cfg = ctx.config;
  const auto mat = cfg.material();
  auto s = start("validate", ctx, mat);
  const auto grid = cfg.grid();
  std::vector<double> deltas(grid.points);
  for (std::size_t i = 0; i < grid.points; ++i) deltas[i] = grid.at(i);

  const auto d = cfg.drive_set();
  ReductionOptions opts;
  opts.auxiliary = std::abs(d.auxiliary);
  opts.backend = cfg.backend_options(ctx.jobs);
  const auto rep = validate_reduction(mat, std::abs(d.coupling), std::abs(d.probe), deltas, opts);
  const bool ok = rep.max_chi_im_deviation < kMaxReductionDeviation;

  ordered_json j;
  j["passed"] = ok;
  j["threshold_rel"] = kMaxReductionDeviation;
  j["max_chi_im_deviation_rel"] = rep.max_chi_im_deviation;
  j["max_chi_re_deviation_rel"] = rep.max_chi_re_deviation;
  j["max_peak_shift_rad_s"] = rep.max_peak_shift;
  j["points_compared"] = rep.points_compared;
  auto& pts = j["points"] = ordered_json::array();
  for (const auto& p : rep.points) {
    pts.push_back({p.delta, p.full.chi_re, p.full.chi_im, p.analytic.chi_re, p.analytic.chi_im, p.compared});
  }
  j["point_columns"] = {"delta_rad_s", "full_chi_re", "full_chi_im", "analytic_chi_re", "analytic_chi_im",
                        "compared"};
  write_atomic(ctx.out_dir / "validate.json", dump(j));

  s.headline["max_chi_im_deviation_rel"] = rep.max_chi_im_deviation;
  s.headline["max_chi_re_deviation_rel"] = rep.max_chi_re_deviation;
  s.headline["passed"] = ok;
  s.exit_code = ok ? kExitOk : kExitValidation;
  say(ctx, "validate: max chi'' deviation ", rep.max_chi_im_deviation, " over ", rep.points_compared,
      " points (", ok ? "ok" : "FAILED", ", threshold ", kMaxReductionDeviation, ")");
  return s;
}

RunSummary cmd_evolve(const RunContext& ctx) {
  const auto& cfg = ctx.config;
  const auto mat = cfg.material();
  auto s = start("evolve", ctx, mat);
  const auto L = build_liouvillian(mat, cfg.drive_set().drives(cfg.probe.detuning));
  EvolveOptions opts;
  opts.samples = cfg.samples;
  const auto traj = evolve(initial_state(cfg.initial), L, cfg.t_end_s, cfg.tol, opts);

  std::string csv = "t_s,rho11,rho22,rho33,rho44,rho55,rho66,abs_rho52\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto& rho = traj.states[i];
    csv += format_double(traj.times[i]);
    for (int k = 1; k <= 6; ++k) {
      csv += ',';
      csv += format_double(rho(k, k).real());
    }
    csv += ',';
    csv += format_double(std::abs(rho(5, 2)));
    csv += '\n';
  }
  write_atomic(ctx.out_dir / "trajectory.csv", csv);

  const auto& last = traj.states.back();
  auto& pops = s.headline["final_populations"] = ordered_json::array();
  for (int k = 1; k <= 6; ++k) pops.push_back(last(k, k).real());
  s.headline["final_abs_rho52"] = std::abs(last(5, 2));
  s.headline["max_trace_drift"] = traj.max_trace_drift;
  s.headline["max_hermiticity_drift"] = traj.max_hermiticity_drift;
  s.headline["accepted_steps"] = traj.accepted_steps;
  s.headline["rejected_steps"] = traj.rejected_steps;
  say(ctx, "evolve: t_end ", cfg.t_end_s, " s, ", traj.accepted_steps, " steps, final rho22 ", last(2, 2).real());
  return s;
}

RunSummary cmd_params(const RunContext& ctx) {
  const auto& cfg = ctx.config;
  const auto mat = cfg.material();
  auto s = start("params", ctx, mat);
  const RunConfig defaults;

  ordered_json j;
  j["rate_convention"] = to_string(mat.rate_convention);
  j["density_per_m3"] = mat.density_per_m3;
  j["dipole_c_m"] = mat.dipole_c_m;
  j["probe_wavelength_m"] = mat.probe_wavelength_m;
  j["lifetimes_s"] = mat.levels.lifetimes_s;
  auto& rates = j["branching_rates_per_s"] = ordered_json::object();
  for (int m = 1; m <= 6; ++m) {
    for (int k = 1; k <= 6; ++k) {
      const double r = mat.levels.branching(m - 1, k - 1);
      if (r != 0.0) rates[std::to_string(m) + "_" + std::to_string(k)] = r;
    }
  }
  auto& gam = j["gamma_rad_s"] = ordered_json::object();
  for (int m = 2; m <= 6; ++m) {
    for (int k = 1; k < m; ++k) gam[std::to_string(m) + "_" + std::to_string(k)] = mat.gamma_between(m, k);
  }
  j["coupling_prefactor_rad_s"] = coupling_prefactor(mat);
  j["probe_omega_rad_s"] = mat.probe_omega();

  auto source = [](bool is_default) { return is_default ? "default" : "config"; };
  ordered_json notes;
  notes["gamma32"] = std::string("pi * (1/T1(3) + 1/T1(2) + dephasing_32[Hz]) under rate_convention ") +
                     to_string(mat.rate_convention) + "; defaults give 6.28e3 rad/s";
  notes["gamma52"] = std::string("pi * (1/T1(5) + 1/T1(2) + dephasing_52[Hz]) under rate_convention ") +
                     to_string(mat.rate_convention) + "; defaults give 4.74e4 rad/s";
  notes["lifetimes"] = std::string(source(cfg.lifetimes_s == defaults.lifetimes_s)) +
                       ": ground levels 400 s, excited levels 164 us at 1.4 K";
  notes["dephasing"] = std::string(source(cfg.dephasing_hz == defaults.dephasing_hz)) +
                       ": 2 kHz on 3-2, 9 kHz on 5-2 and 5-3";
  notes["branching"] = std::string(source(cfg.branching_frac == defaults.branching_frac)) +
                       ": equal shares into every lower level";
  notes["probe_wavelength"] = std::string(source(cfg.probe_wavelength_m == defaults.probe_wavelength_m)) +
                              ": 605.7 nm is the Pr:YSO 3H4 -> 1D2 line, taken from the literature rather "
                              "than from the rate data";
  notes["density"] = std::string(source(cfg.density_per_m3 == defaults.density_per_m3)) + ": 4.7e18 cm^-3";
  notes["dipole"] = std::string(source(cfg.dipole_c_m == defaults.dipole_c_m)) + ": mu52 = 1e-33 C m";
  j["provenance"] = notes;
  write_atomic(ctx.out_dir / "params.json", dump(j));

  s.headline["gamma32_rad_s"] = mat.gamma_between(3, 2);
  s.headline["gamma52_rad_s"] = mat.gamma_between(5, 2);

  say(ctx, "material parameters (rate_convention ", to_string(mat.rate_convention), ")");
  say(ctx, "  gamma32 = ", mat.gamma_between(3, 2), " rad/s   [", notes["gamma32"].get<std::string>(), "]");
  say(ctx, "  gamma52 = ", mat.gamma_between(5, 2), " rad/s   [", notes["gamma52"].get<std::string>(), "]");
  say(ctx, "  A = N mu^2/(eps0 hbar) = ", coupling_prefactor(mat), " rad/s");
  say(ctx, "  probe wavelength ", mat.probe_wavelength_m, " m   [", notes["probe_wavelength"].get<std::string>(), "]");
  for (int m = 1; m <= 6; ++m) say(ctx, "  T1(", m, ") = ", mat.levels.lifetimes_s[m - 1], " s");
  return s;
}

int run_command(const std::string& command, const RunContext& ctx, std::ostream& err) {
  static const std::map<std::string, std::function<RunSummary(const RunContext&)>> table = {
      {"spectrum", cmd_spectrum}, {"window", cmd_window},     {"vg", cmd_vg},
      {"validate", cmd_validate}, {"evolve", cmd_evolve},     {"params", cmd_params},
  };
  const auto it = table.find(command);
  if (it == table.end()) {
    err << "error: unknown command '" << command << "'\n";
    return kExitConfig;
  }
  const auto t0 = std::chrono::steady_clock::now();
  try {
    std::filesystem::create_directories(ctx.out_dir);
    auto summary = it->second(ctx);
    summary.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_atomic(ctx.out_dir / "summary.json", dump(summary.to_json()));
    return summary.exit_code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.category() == Error::Category::kConfig ? kExitConfig : kExitSolver;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace eit::cli
