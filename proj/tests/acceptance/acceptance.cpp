// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Runs the CLI commands in-process.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eit/cli/commands.hpp"
#include "eit/cli/config.hpp"
#include "eit/lambda.hpp"
#include "eit/optics.hpp"

using namespace eit;
using namespace eit::cli;
namespace fs = std::filesystem;

namespace {

// Closed-form group velocity of the default EIT configuration, evaluated
// independently in extended precision.
constexpr double kVgClosedForm = 21.5698820823938363;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> check;
};

fs::path workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "eit_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

// Runs a CLI command; returns its exit status and output directory.
std::pair<int, fs::path> run(const std::string& cmd, const std::string& tag, const std::vector<std::string>& sets,
                             std::size_t jobs = 1) {
  RunContext ctx;
  ctx.config = load_config(std::nullopt, sets);
  ctx.out_dir = workdir() / tag;
  ctx.jobs = jobs;
  std::ostringstream err;
  const int code = run_command(cmd, ctx, err);
  if (code != kExitOk && code != kExitValidation) std::fprintf(stderr, "%s", err.str().c_str());
  return {code, ctx.out_dir};
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

LambdaParams<double> defaults_lambda(double omega_c) { return lambda_from_material(pryso_defaults(), omega_c); }

Outcome rates() {
  const auto [code, out] = run("params", "params", {});
  if (code != kExitOk) return {false, "params command failed"};
  const auto j = read_json(out / "params.json");
  const double g32 = j["gamma_rad_s"]["3_2"], g52 = j["gamma_rad_s"]["5_2"];
  const bool ok = rel(g32, 6.28e3) <= 0.01 && rel(g52, 4.71e4) <= 0.02;
  return {ok, fmt("gamma32 = %.6g rad/s (%.3f%% off 6.28e3, tol 1%%), gamma52 = %.6g rad/s (%.3f%% off 4.71e4, "
                  "tol 2%%)",
                  g32, 100 * rel(g32, 6.28e3), g52, 100 * rel(g52, 4.71e4))};
}

Outcome lorentzian() {
  const auto p = defaults_lambda(0.0);
  double worst = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const double d = -1e7 + 2e7 * i / (n - 1);
    const auto chi = chi_analytic(p, d).value();
    const Complex lor = p.coupling_a * Complex(d, p.gamma52) / (d * d + p.gamma52 * p.gamma52);
    worst = std::max(worst, std::abs(chi - lor) / std::abs(lor));
  }
  return {worst <= 1e-12, fmt("max relative deviation %.3g over %d points (tol 1e-12)", worst, n)};
}

Outcome hole_burning() {
  const auto off = run("spectrum", "hole_off", {"drives.coupling.rabi_rad_s=0"});
  const auto on = run("spectrum", "hole_on", {"drives.coupling.rabi_rad_s=1.5e6"});
  if (off.first != kExitOk || on.first != kExitOk) return {false, "spectrum command failed"};
  const double a_off = read_json(off.second / "summary.json")["headline"]["alpha_at_zero_per_m"];
  const double a_on = read_json(on.second / "summary.json")["headline"]["alpha_at_zero_per_m"];
  const double ratio = a_off / a_on;
  const double expected = eit_suppression_ratio(defaults_lambda(1.5e6));
  return {rel(ratio, expected) <= 1e-3,
          fmt("alpha(0) suppressed %.6g x, closed form %.6g x (%.2e rel, tol 1e-3)", ratio, expected,
              rel(ratio, expected))};
}

Outcome slow_light() {
  const auto [code, out] = run("vg", "vg", {"drives.coupling.rabi_rad_s=1.5e6"});
  if (code != kExitOk) return {false, "vg command failed"};
  const double vg = read_json(out / "vg.json")["v_g_m_s"];
  const bool ok = vg < 50.0 && rel(vg, kVgClosedForm) <= 0.1;
  return {ok, fmt("v_g = %.6g m/s (< 50 m/s; %.2e rel to closed form %.6g, tol 10%%)", vg, rel(vg, kVgClosedForm),
                  kVgClosedForm)};
}

std::vector<std::string> reduction_sets(double probe_ratio) {
  return {"drives.coupling.rabi_rad_s=1.5e6", "drives.auxiliary.rabi_rad_s=1.5e6",
          "drives.probe.rabi_rad_s=" + format_double(probe_ratio * 1.5e6), "grid.delta_min_rad_s=-2e7",
          "grid.delta_max_rad_s=2e7", "grid.points_count=201"};
}

Outcome reduction(double probe_ratio, const std::string& tag) {
  const auto [code, out] = run("validate", tag, reduction_sets(probe_ratio));
  if (code != kExitOk && code != kExitValidation) return {false, "validate command failed"};
  const double dev = read_json(out / "validate.json")["max_chi_im_deviation_rel"];
  return {dev < 0.02, fmt("Omega_P = %g Omega_C: max chi'' deviation %.4g over 201 points (tol 0.02)", probe_ratio,
                          dev)};
}

Outcome pumping() {
  const auto [code, out] = run("evolve", "pumping",
                               {"drives.probe.rabi_rad_s=0", "drives.coupling.rabi_rad_s=1e6",
                                "drives.auxiliary.rabi_rad_s=1e6", "solver.initial=uniform", "solver.t_end_s=0.01"});
  if (code != kExitOk) return {false, "evolve command failed"};
  const auto h = read_json(out / "summary.json")["headline"];
  const double rho22 = h["final_populations"][1];
  const double tr = h["max_trace_drift"], herm = h["max_hermiticity_drift"];
  const bool ok = rho22 > 0.99 && tr <= 1e-9 && herm <= 1e-9;
  return {ok, fmt("rho22(10 ms) = %.6f (> 0.99), trace drift %.2e, hermiticity drift %.2e (tol 1e-9)", rho22, tr,
                  herm)};
}

Outcome gradient() {
  const auto p = defaults_lambda(1.5e6);
  double worst = 0.0;
  int checked = 0;
  for (double d : {0.0, 0.5 * p.omega_c, -0.5 * p.omega_c, 10 * p.gamma52, -10 * p.gamma52}) {
    for (double h : {p.gamma32 / 300, p.gamma32 / 1000, p.gamma32 / 3000}) {
      const double fd = (chi_analytic(p, d + h).chi_re - chi_analytic(p, d - h).chi_re) / (2 * h);
      worst = std::max(worst, rel(fd, dchi_prime_ddelta(p, d)));
      ++checked;
    }
  }
  return {worst <= 1e-6, fmt("max relative deviation %.3g over %d (delta, h) pairs (tol 1e-6)", worst, checked)};
}

std::vector<Susceptibility<double>> full_chi(double probe_ratio, const std::vector<double>& deltas) {
  const auto mat = pryso_defaults();
  DriveSet d;
  d.coupling = 1.5e6;
  d.auxiliary = 1.5e6;
  d.probe = probe_ratio * 1.5e6;
  BackendOptions opts;
  return evaluate_chi_many(Backend::kFull, mat, d, deltas, opts);
}

Outcome linearity(double low, double high) {
  std::vector<double> deltas(201);
  for (int i = 0; i < 201; ++i) deltas[i] = DetuningGrid{-2e7, 2e7, 201}.at(i);
  const auto a = full_chi(low, deltas);
  const auto b = full_chi(high, deltas);
  double worst = 0.0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    worst = std::max(worst, std::abs(b[i].value() - a[i].value()) / std::abs(a[i].value()));
  }
  return {worst <= 0.01, fmt("full chi at %g vs %g Omega_C: max relative difference %.4g over 201 points (tol 0.01)",
                             low, high, worst)};
}

Outcome window_metric() {
  const double g52 = pryso_defaults().gamma_between(5, 2);
  double worst = 0.0;
  std::string detail;
  for (double q : {10.0, 30.0, 100.0}) {
    const double wc = q * g52;
    const auto [code, out] = run("window", "window_q" + std::to_string(static_cast<int>(q)),
                                 {"drives.coupling.rabi_rad_s=" + format_double(wc),
                                  "drives.auxiliary.rabi_rad_s=" + format_double(wc),
                                  "grid.delta_min_rad_s=" + format_double(-wc),
                                  "grid.delta_max_rad_s=" + format_double(wc), "grid.points_count=20001"});
    if (code != kExitOk) return {false, "window command failed"};
    const auto j = read_json(out / "window.json");
    const double w = j["width_rad_s"], closed = j["closed_form_width_rad_s"];
    worst = std::max(worst, rel(w, closed));
    detail += fmt("q=%g: %.6g vs %.6g; ", q, w, closed);
  }
  return {worst <= 0.005, detail + fmt("max relative deviation %.3g (tol 0.005)", worst)};
}

Outcome determinism() {
  const std::vector<std::string> sets = {"backend=full"};
  const auto one = run("spectrum", "det_jobs1", sets, 1);
  const auto eight = run("spectrum", "det_jobs8", sets, 8);
  if (one.first != kExitOk || eight.first != kExitOk) return {false, "spectrum command failed"};
  const auto a = slurp(one.second / "spectrum.csv");
  const auto b = slurp(eight.second / "spectrum.csv");
  return {a == b && !a.empty(), fmt("full-backend spectrum.csv (%zu bytes) %s across --jobs 1 and --jobs 8", a.size(),
                                    a == b ? "byte-identical" : "DIFFERS")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "rate derivation", 1.0, rates},
      {2, "two-level Lorentzian identity", 1.0, lorentzian},
      {3, "EIT hole burning", 1.0, hole_burning},
      {4, "slow light", 1.0, slow_light},
      {5, "Lambda-reduction equivalence", 10.0, [] { return reduction(1e-2, "reduction"); }},
      {6, "optical pumping", 30.0, pumping},
      {7, "gradient check", 1.0, gradient},
      {8, "probe linearity", 20.0, [] { return linearity(1e-3, 1e-2); }},
      {9, "window metric", 5.0, window_metric},
      {10, "determinism", 5.0, determinism},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = dt < c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("[%s] %2d %s: %s; %.3f s (budget %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), dt, c.budget_s, in_time ? "" : " OVER BUDGET");
  }

  // Same measurements with a weaker probe, for context on 5 and 8.
  const auto r = reduction(1e-3, "reduction_info");
  std::printf("[INFO]  5 at reduced probe: %s\n", r.detail.c_str());
  const auto l = linearity(1e-4, 1e-3);
  std::printf("[INFO]  8 at reduced probe: %s\n", l.detail.c_str());

  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
