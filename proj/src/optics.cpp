#include "eit/optics.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace eit {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Six-level model level assignment.
constexpr int kProbeUpper = 5, kProbeLower = 2;
constexpr int kCouplingUpper = 5, kCouplingLower = 3;
constexpr int kAuxUpper = 6, kAuxLower = 1;

void append_number(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}
}  // namespace

Susceptibility<double> rho_to_chi(Complex rho52, const MaterialParams& mat, Complex omega_p) {
  if (omega_p == Complex(0.0, 0.0)) {
    throw DivisionByZero("probe Rabi frequency is zero; susceptibility undefined");
  }
  const Complex chi = 2.0 * coupling_prefactor(mat) * rho52 / omega_p;
  return {chi.real(), chi.imag()};
}

double absorption(const Susceptibility<double>& chi, double wavelength_m) {
  if (!(wavelength_m > 0.0)) throw InvalidArgument("wavelength must be > 0");
  if (chi.chi_im < -1e-12) {
    std::ostringstream os;
    os << "negative chi'' = " << chi.chi_im << " (gain) violates the absorption convention";
    throw ConventionViolation(os.str());
  }
  return 0.5 * (kTwoPi / wavelength_m) * chi.chi_im;
}

double group_velocity_analytic(const LambdaParams<double>& p, const MaterialParams& mat,
                               double delta) {
  const double omega = mat.probe_omega() - delta;
  const double n = refractive_index(chi_analytic(p, delta));
  const double dn_domega = -0.5 * dchi_prime_ddelta(p, delta);
  const double group_index = n + omega * dn_domega;
  if (!(std::abs(group_index) >= 1e-12)) {
    throw DivergentVelocity("group index vanishes; group velocity diverges");
  }
  return PhysicalConstants::c / group_index;
}

std::string to_string(Backend b) { return b == Backend::kAnalytic ? "analytic" : "full"; }

Backend backend_from_string(const std::string& s) {
  if (s == "analytic") return Backend::kAnalytic;
  if (s == "full") return Backend::kFull;
  throw ConfigError("backend must be 'analytic' or 'full', got '" + s + "'");
}

std::vector<FieldDrive> DriveSet::drives(double probe_detuning) const {
  std::vector<FieldDrive> out;
  out.push_back({kProbeUpper, kProbeLower, probe, probe_detuning});
  out.push_back({kCouplingUpper, kCouplingLower, coupling, coupling_detuning});
  out.push_back({kAuxUpper, kAuxLower, auxiliary, auxiliary_detuning});
  return out;
}

void DetuningGrid::validate() const {
  if (points < 2) throw ConfigError("detuning grid needs at least 2 points");
  if (!std::isfinite(min) || !std::isfinite(max) || !(max > min)) {
    throw ConfigError("detuning grid needs finite delta_min < delta_max");
  }
}

double DetuningGrid::at(std::size_t i) const {
  if (i + 1 == points) return max;
  return min + (max - min) * static_cast<double>(i) / static_cast<double>(points - 1);
}

std::string Spectrum::to_csv() const {
  std::string out = "delta_rad_s,chi_re,chi_im,n,alpha_per_m\n";
  for (const auto& r : rows) {
    append_number(out, r.delta);
    out += ',';
    append_number(out, r.chi_re);
    out += ',';
    append_number(out, r.chi_im);
    out += ',';
    append_number(out, r.n);
    out += ',';
    append_number(out, r.alpha);
    out += '\n';
  }
  return out;
}

std::string Spectrum::to_json() const {
  nlohmann::ordered_json doc;
  doc["backend"] = to_string(backend);
  doc["params"] = params_digest.empty() ? nlohmann::ordered_json::object()
                                        : nlohmann::ordered_json::parse(params_digest);
  doc["columns"] = {"delta_rad_s", "chi_re", "chi_im", "n", "alpha_per_m"};
  auto& rows_json = doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) rows_json.push_back({r.delta, r.chi_re, r.chi_im, r.n, r.alpha});
  return doc.dump(2) + "\n";
}

Susceptibility<double> evaluate_chi(Backend backend, const MaterialParams& mat,
                                    const DriveSet& drives, double delta,
                                    const BackendOptions& opts) {
  if (backend == Backend::kAnalytic) {
    if (drives.coupling_detuning != 0.0) {
      throw ConfigError("analytic backend assumes a resonant coupling field");
    }
    auto p = lambda_from_material(mat, std::abs(drives.coupling));
    p.gamma52 *= opts.analytic_gamma52_factor;
    return chi_analytic(p, delta);
  }
  const double wc = std::abs(drives.coupling);
  const double wp = std::abs(drives.probe);
  if (wc > 0.0 && wp > 0.05 * wc) {
    std::ostringstream os;
    os << "full backend needs a weak probe: |Wp| = " << wp << " exceeds 0.05 |Wc| = " << 0.05 * wc;
    throw InvalidArgument(os.str());
  }
  const auto L = build_liouvillian(mat, drives.drives(delta));
  const auto rho = steady_state(L, opts.steady);
  return rho_to_chi(coherence(rho, kProbeUpper, kProbeLower), mat, drives.probe);
}

std::vector<Susceptibility<double>> evaluate_chi_many(Backend backend, const MaterialParams& mat,
                                                     const DriveSet& drives,
                                                     std::span<const double> deltas,
                                                     const BackendOptions& opts) {
  std::vector<Susceptibility<double>> out(deltas.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = deltas.size();
  std::exception_ptr error;

  auto worker = [&] {
    for (std::size_t i = next++; i < deltas.size(); i = next++) {
      try {
        out[i] = evaluate_chi(backend, mat, drives, deltas[i], opts);
      } catch (const Error& e) {
        std::ostringstream os;
        os << "at delta = " << deltas[i] << " rad/s: ";
        std::lock_guard lock(error_mutex);
        // Lowest failing index wins so the reported error is order-independent.
        if (i < error_index) {
          error_index = i;
          try {
            e.rethrow_with_context(os.str());
          } catch (const Error&) {
            error = std::current_exception();
          }
        }
      }
    }
  };

  const std::size_t jobs = std::clamp<std::size_t>(opts.jobs, 1, std::max<std::size_t>(deltas.size(), 1));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return out;
}

Spectrum sweep(Backend backend, const MaterialParams& mat, const DriveSet& drives,
               const DetuningGrid& grid, const BackendOptions& opts) {
  grid.validate();
  std::vector<double> deltas(grid.points);
  for (std::size_t i = 0; i < grid.points; ++i) deltas[i] = grid.at(i);
  const auto chis = evaluate_chi_many(backend, mat, drives, deltas, opts);

  Spectrum spec;
  spec.backend = backend;
  spec.rows.reserve(deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const auto& chi = chis[i];
    spec.rows.push_back({deltas[i], chi.chi_re, chi.chi_im, refractive_index(chi),
                         absorption(chi, mat.probe_wavelength_m)});
  }
  return spec;
}

double IndexSampler::operator()(double omega) const {
  const double delta = delta0 - (omega - omega_at_delta0());
  return refractive_index(evaluate_chi(backend, *mat, drives, delta, opts));
}

WindowReport transparency_window(const Spectrum& spectrum, double reference_alpha) {
  const auto& rows = spectrum.rows;
  if (rows.size() < 2 || rows.front().delta > 0.0 || rows.back().delta < 0.0) {
    throw InvalidArgument("spectrum must cover delta = 0");
  }
  if (!(reference_alpha > 0.0)) throw InvalidArgument("reference absorption must be > 0");

  WindowReport rep;
  rep.reference_alpha = reference_alpha;
  rep.threshold_alpha = 0.5 * reference_alpha;
  const double thr = rep.threshold_alpha;

  // (delta, alpha) with delta = 0 present, interpolated if off-grid.
  std::vector<std::pair<double, double>> pts;
  pts.reserve(rows.size() + 1);
  for (const auto& r : rows) pts.emplace_back(r.delta, r.alpha);
  auto it = std::lower_bound(pts.begin(), pts.end(), 0.0,
                             [](const auto& p, double d) { return p.first < d; });
  if (it->first != 0.0) {
    const auto& a = *(it - 1);
    const auto& b = *it;
    const double alpha0 = a.second + (b.second - a.second) * (0.0 - a.first) / (b.first - a.first);
    it = pts.insert(it, {0.0, alpha0});
  }
  const auto zero = static_cast<std::size_t>(it - pts.begin());
  rep.alpha_at_zero = pts[zero].second;
  if (!(rep.alpha_at_zero < thr)) return rep;
  rep.found = true;

  auto crossing = [thr](const std::pair<double, double>& in, const std::pair<double, double>& out) {
    return in.first + (out.first - in.first) * (thr - in.second) / (out.second - in.second);
  };

  std::size_t r = zero + 1;
  while (r < pts.size() && pts[r].second <= thr) ++r;
  if (r == pts.size()) {
    rep.truncated = true;
    rep.edges.second = pts.back().first;
  } else {
    rep.edges.second = crossing(pts[r - 1], pts[r]);
  }

  std::ptrdiff_t l = static_cast<std::ptrdiff_t>(zero) - 1;
  while (l >= 0 && pts[l].second <= thr) --l;
  if (l < 0) {
    rep.truncated = true;
    rep.edges.first = pts.front().first;
  } else {
    rep.edges.first = crossing(pts[l + 1], pts[l]);
  }

  rep.width = rep.edges.second - rep.edges.first;
  rep.width_hz = rep.width / kTwoPi;
  return rep;
}

double autler_townes_separation(const Spectrum& spectrum) {
  const auto& rows = spectrum.rows;
  auto peak = [&](bool positive) -> double {
    std::size_t best = rows.size();
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
      if ((rows[i].delta > 0.0) != positive || rows[i].delta == 0.0) continue;
      if (rows[i].alpha >= rows[i - 1].alpha && rows[i].alpha >= rows[i + 1].alpha &&
          (best == rows.size() || rows[i].alpha > rows[best].alpha)) {
        best = i;
      }
    }
    if (best == rows.size()) return std::nan("");
    const double y0 = rows[best - 1].alpha, y1 = rows[best].alpha, y2 = rows[best + 1].alpha;
    const double step = rows[best + 1].delta - rows[best].delta;
    const double curv = y0 - 2.0 * y1 + y2;
    const double offset = curv == 0.0 ? 0.0 : 0.5 * (y0 - y2) / curv;
    return rows[best].delta + offset * step;
  };
  const double lo = peak(false);
  const double hi = peak(true);
  if (std::isnan(lo) || std::isnan(hi)) return 0.0;
  return hi - lo;
}

}  // namespace eit
