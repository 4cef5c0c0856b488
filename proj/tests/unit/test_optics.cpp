#include <doctest.h>

#include <numbers>

#include "eit/optics.hpp"
#include "eit/reduction.hpp"
#include "test_support.hpp"

using namespace eit;
using testing::rel_diff;

namespace {

constexpr double kC = PhysicalConstants::c;

DriveSet eit_drives(double wc = 1.5e6, double wp_ratio = 1e-3) {
  DriveSet d;
  d.coupling = wc;
  d.auxiliary = wc;
  d.probe = wp_ratio * wc;
  return d;
}

}  // namespace

TEST_CASE("rho_to_chi") {
  const auto mat = pryso_defaults();
  const double a = coupling_prefactor(mat);
  CHECK(rho_to_chi(0.0, mat, 1e4).value() == Complex(0.0));

  const double wp = 1e4, g52 = mat.gamma_between(5, 2);
  const auto chi = rho_to_chi(Complex(0.0, wp / (2 * g52)), mat, wp);
  CHECK(chi.chi_re == 0.0);
  CHECK(rel_diff(chi.chi_im, a / g52) < 1e-14);
  CHECK(rel_diff(chi.chi_im, chi_analytic(lambda_from_material(mat, 0.0), 0.0).chi_im) < 1e-14);

  const Complex rho(3e-3, 7e-4);
  const auto c1 = rho_to_chi(rho, mat, 2e3);
  const auto c2 = rho_to_chi(4.0 * rho, mat, 8e3);
  CHECK(std::abs(c1.value() - c2.value()) <= 1e-15 * std::abs(c1.value()));
  CHECK_THROWS_AS(rho_to_chi(rho, mat, 0.0), DivisionByZero);
}

TEST_CASE("refractive_index") {
  CHECK(refractive_index({0.0, 0.3}) == 1.0);
  CHECK(refractive_index({0.2, 0.0}) == doctest::Approx(1.1));
  CHECK(refractive_index({-0.04, 0.0}) == doctest::Approx(0.98));
}

TEST_CASE("absorption") {
  const auto mat = pryso_defaults();
  CHECK(absorption({0.5, 0.0}, 605.7e-9) == 0.0);
  const auto ref = chi_analytic(lambda_from_material(mat, 0.0), 0.0);
  CHECK(absorption(ref, mat.probe_wavelength_m) == doctest::Approx(550438.153583366692).epsilon(1e-12));
  const auto eit = chi_analytic(lambda_from_material(mat, 1.5e6), 0.0);
  CHECK(absorption(eit, mat.probe_wavelength_m) == doctest::Approx(291.469867538216897).epsilon(1e-12));
  CHECK_THROWS_AS(absorption({0.0, -1e-9}, 605.7e-9), ConventionViolation);
  CHECK_NOTHROW(absorption({0.0, -1e-13}, 605.7e-9));
  CHECK_THROWS_AS(absorption({0.0, 1.0}, 0.0), InvalidArgument);
}

TEST_CASE("group_velocity") {
  CHECK(group_velocity([](double) { return 1.0; }, 3e15, 10.0) == kC);
  CHECK_THROWS_AS(group_velocity([](double w) { return 1.0 - 5e-4 * w; }, 1000.0, 1.0), DivergentVelocity);
  CHECK_THROWS_AS(group_velocity([](double) { return 1.0; }, 1.0, 0.0), InvalidArgument);

  const auto mat = pryso_defaults();
  IndexSampler n{Backend::kAnalytic, &mat, eit_drives(), {}, 0.0};
  const double h = mat.gamma_between(3, 2) / 100;
  const double vg = group_velocity(n, n.omega_at_delta0(), h);
  // c / (1 + w A (Wc^2/4 - g32^2) / (2 (g32 g52 + Wc^2/4)^2)), mpmath
  CHECK(vg == doctest::Approx(21.5698820823938363).epsilon(1e-6));
  CHECK(vg < 50.0);
  CHECK(group_velocity_analytic(lambda_from_material(mat, 1.5e6), mat, 0.0) ==
        doctest::Approx(21.5698820823938363).epsilon(1e-12));
}

TEST_CASE("group_velocity on the Lorentzian wing is subluminal") {
  const auto mat = pryso_defaults();
  DriveSet probe_only;
  probe_only.probe = 1e3;
  const double g52 = mat.gamma_between(5, 2);
  IndexSampler n{Backend::kAnalytic, &mat, probe_only, {}, 10 * g52};
  const double vg = group_velocity(n, n.omega_at_delta0(), g52 / 100);
  CHECK(std::isfinite(vg));
  CHECK(vg > 0.0);
  CHECK(vg < kC);
}

TEST_CASE("finite-difference and analytic group velocity agree across two decades of step") {
  const auto mat = pryso_defaults();
  const auto p = lambda_from_material(mat, 1.5e6);
  const double exact = group_velocity_analytic(p, mat, 0.0);
  IndexSampler n{Backend::kAnalytic, &mat, eit_drives(), {}, 0.0};
  for (double div : {10.0, 30.0, 100.0, 300.0, 1000.0}) {
    CHECK(rel_diff(group_velocity(n, n.omega_at_delta0(), p.gamma32 / div), exact) < 1e-4);
  }
}

TEST_CASE("sweep, analytic backend") {
  const auto mat = pryso_defaults();
  DetuningGrid grid{-2e7, 2e7, 101};

  DriveSet off;
  const auto lorentz = sweep(Backend::kAnalytic, mat, off, grid);
  REQUIRE(lorentz.rows.size() == 101);
  const auto peak = std::max_element(lorentz.rows.begin(), lorentz.rows.end(),
                                     [](const auto& a, const auto& b) { return a.alpha < b.alpha; });
  CHECK(peak->delta == 0.0);

  const auto eit = sweep(Backend::kAnalytic, mat, eit_drives(), DetuningGrid{-2e6, 2e6, 401});
  const auto& mid = eit.rows[200];
  CHECK(mid.delta == 0.0);
  // Hole: a local minimum at resonance flanked by the Autler-Townes peaks.
  CHECK(mid.alpha < eit.rows[199].alpha);
  CHECK(mid.alpha < eit.rows[201].alpha);
  const double at_peak = std::max_element(eit.rows.begin(), eit.rows.end(), [](const auto& a, const auto& b) {
                           return a.alpha < b.alpha;
                         })->alpha;
  CHECK(mid.alpha < 1e-2 * at_peak);
  CHECK(autler_townes_separation(eit) == doctest::Approx(1.5e6).epsilon(0.01));

  for (const auto* s : {&lorentz, &eit}) {
    const auto& rows = s->rows;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      const auto& m = rows[rows.size() - 1 - i];
      CHECK(r.alpha >= 0.0);
      CHECK(r.n == 1.0 + 0.5 * r.chi_re);
      if (i > 0) CHECK(r.delta > rows[i - 1].delta);
      CHECK(std::abs(r.chi_im - m.chi_im) <= 1e-10 * std::abs(r.chi_im));
      CHECK(std::abs(r.chi_re + m.chi_re) <= 1e-10 * std::abs(Complex(r.chi_re, r.chi_im)));
    }
  }

  // chi' changes sign across the uncoupled absorption peak.
  CHECK(lorentz.rows[49].chi_re < 0.0);
  CHECK(lorentz.rows[50].chi_re == 0.0);
  CHECK(lorentz.rows[51].chi_re > 0.0);
}

TEST_CASE("sweep argument handling") {
  const auto mat = pryso_defaults();
  CHECK_THROWS_AS(sweep(Backend::kAnalytic, mat, eit_drives(), {-1.0, 1.0, 1}), ConfigError);
  CHECK_THROWS_AS(sweep(Backend::kAnalytic, mat, eit_drives(), {1.0, -1.0, 5}), ConfigError);
  auto detuned = eit_drives();
  detuned.coupling_detuning = 1e3;
  CHECK_THROWS_AS(sweep(Backend::kAnalytic, mat, detuned, {-1.0, 1.0, 3}), ConfigError);

  auto strong = eit_drives(1.5e6, 0.2);
  try {
    sweep(Backend::kFull, mat, strong, {-1e6, 1e6, 3}, {4});
    FAIL("expected weak-probe rejection");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("at delta = -1e+06") != std::string::npos);
    CHECK(e.category() == Error::Category::kConfig);
  }
}

TEST_CASE("sweep output is independent of the job count") {
  const auto mat = pryso_defaults();
  const DetuningGrid grid{-3e6, 3e6, 61};
  for (auto backend : {Backend::kAnalytic, Backend::kFull}) {
    const auto one = sweep(backend, mat, eit_drives(), grid, {1});
    const auto many = sweep(backend, mat, eit_drives(), grid, {8});
    CHECK(one.to_csv() == many.to_csv());
  }
}

TEST_CASE("full and analytic backends agree in the weak-probe regime") {
  const auto mat = pryso_defaults();
  const DetuningGrid grid{-2e7, 2e7, 201};
  const auto full = sweep(Backend::kFull, mat, eit_drives(), grid, {2});
  const auto ana = sweep(Backend::kAnalytic, mat, eit_drives(), grid);
  double peak = 0.0;
  for (const auto& r : ana.rows) peak = std::max(peak, r.chi_im);
  for (std::size_t i = 0; i < grid.points; ++i) {
    if (ana.rows[i].chi_im < 0.01 * peak) continue;
    CHECK(rel_diff(full.rows[i].chi_im, ana.rows[i].chi_im) < 0.02);
  }
  // Symmetric grid: the full model keeps the parity within 1%.
  for (std::size_t i = 0; i < grid.points; ++i) {
    const auto& r = full.rows[i];
    const auto& m = full.rows[grid.points - 1 - i];
    CHECK(std::abs(r.chi_im - m.chi_im) <= 0.01 * std::abs(r.chi_im));
  }
}

TEST_CASE("full-model |chi| does not depend on field phases") {
  const auto mat = pryso_defaults();
  auto d = eit_drives();
  const double base = std::abs(evaluate_chi(Backend::kFull, mat, d, 3e5).value());
  d.coupling = std::polar(1.5e6, 1.1);
  d.auxiliary = std::polar(1.5e6, -2.3);
  d.probe = std::polar(1.5e3, 0.4);
  const double phased = std::abs(evaluate_chi(Backend::kFull, mat, d, 3e5).value());
  CHECK(rel_diff(base, phased) < 1e-9);
}

TEST_CASE("transparency_window") {
  const auto mat = pryso_defaults();
  const double ref = absorption(chi_analytic(lambda_from_material(mat, 0.0), 0.0), mat.probe_wavelength_m);

  DriveSet off;
  const auto none = transparency_window(sweep(Backend::kAnalytic, mat, off, {-2e7, 2e7, 201}), ref);
  CHECK_FALSE(none.found);
  CHECK(none.width == 0.0);

  const auto spec = sweep(Backend::kAnalytic, mat, eit_drives(), {-2e6, 2e6, 4001});
  const auto win = transparency_window(spec, ref);
  REQUIRE(win.found);
  CHECK_FALSE(win.truncated);
  CHECK(win.threshold_alpha == ref / 2);
  CHECK(win.width == doctest::Approx(1453319.3).epsilon(0.005));
  CHECK(win.width_hz == doctest::Approx(win.width / (2 * std::numbers::pi)));
  CHECK(win.edges.first == doctest::Approx(-win.edges.second).epsilon(1e-9));

  // Off-grid zero: an even point count straddles resonance.
  const auto even = transparency_window(sweep(Backend::kAnalytic, mat, eit_drives(), {-2e6, 2e6, 4000}), ref);
  CHECK(even.width == doctest::Approx(win.width).epsilon(1e-3));

  CHECK_THROWS_AS(transparency_window(sweep(Backend::kAnalytic, mat, eit_drives(), {1.0, 2.0, 3}), ref),
                  InvalidArgument);
}

TEST_CASE("window width grows with the coupling strength") {
  const auto mat = pryso_defaults();
  const double ref = absorption(chi_analytic(lambda_from_material(mat, 0.0), 0.0), mat.probe_wavelength_m);
  double last = 0.0;
  for (double wc = 5e5; wc <= 5e6; wc *= 1.25) {
    const auto w = transparency_window(sweep(Backend::kAnalytic, mat, eit_drives(wc), {-wc, wc, 2001}), ref);
    REQUIRE(w.found);
    CHECK(w.width > last);
    last = w.width;
  }
}

TEST_CASE("window width matches the closed form across Wc/g52 in [10, 100]") {
  const auto mat = pryso_defaults();
  const double g52 = mat.gamma_between(5, 2);
  const double ref = absorption(chi_analytic(lambda_from_material(mat, 0.0), 0.0), mat.probe_wavelength_m);
  for (double q : {10.0, 20.0, 50.0, 100.0}) {
    const double wc = q * g52;
    const auto w = transparency_window(sweep(Backend::kAnalytic, mat, eit_drives(wc), {-wc, wc, 20001}), ref);
    CHECK(rel_diff(w.width, window_width_closed_form(lambda_from_material(mat, wc))) < 0.005);
  }
}

TEST_CASE("spectrum serialization") {
  Spectrum s;
  s.rows = {{-1.5, 0.25, 1e-7, 1.125, 3.0}, {0.0, 0.0, 0.1, 1.0, 550438.15358336671}};
  s.params_digest = R"({"b":1,"a":2})";
  CHECK(s.to_csv() ==
        "delta_rad_s,chi_re,chi_im,n,alpha_per_m\n"
        "-1.5,0.25,1e-07,1.125,3\n"
        "0,0,0.1,1,550438.1535833667\n");
  const auto json = s.to_json();
  CHECK(json.find("\"backend\": \"analytic\"") != std::string::npos);
  CHECK(json.find("\"b\": 1") < json.find("\"a\": 2"));
  CHECK(json == s.to_json());
}

TEST_CASE("validate_reduction in the weak-probe regime") {
  const auto mat = pryso_defaults();
  std::vector<double> grid;
  for (int i = 0; i <= 200; ++i) grid.push_back(-2e7 + 2e5 * i);
  const double wc = 1.5e6;
  const auto rep = validate_reduction(mat, wc, 1e-3 * wc, grid);
  CHECK(rep.max_chi_im_deviation < 0.02);
  CHECK(rep.max_chi_re_deviation < 0.02);
  CHECK(rep.max_peak_shift <= 2e5);
  CHECK(rep.points_compared > 0);
  CHECK(rep.points.size() == grid.size());

  ReductionOptions broken;
  broken.backend.analytic_gamma52_factor = 10.0;
  CHECK(validate_reduction(mat, wc, 1e-3 * wc, grid, broken).max_chi_im_deviation > 0.02);

  CHECK_THROWS_AS(validate_reduction(mat, wc, 0.2 * wc, grid), InvalidArgument);
  CHECK_THROWS_AS(validate_reduction(mat, wc, 0.0, grid), InvalidArgument);
}

TEST_CASE("validate_reduction at saturating probe strength") {
  // 1e-2 Wc drives 2-5 near saturation, so |2> is pumped out near the
  // Autler-Townes peaks and the Lambda picture no longer holds.
  const auto mat = pryso_defaults();
  std::vector<double> grid;
  for (int i = 0; i <= 200; ++i) grid.push_back(-2e7 + 2e5 * i);
  const auto rep = validate_reduction(mat, 1.5e6, 1.5e4, grid);
  CHECK(rep.max_chi_im_deviation > 0.3);
}

TEST_CASE("validate_reduction without coupling") {
  const auto mat = pryso_defaults();
  // No coupling field means nothing returns population to |2>; the full
  // steady state is |1> and the probe sees no absorption at all.
  const std::vector<double> grid{-1e5, 0.0, 1e5};
  const auto rep = validate_reduction(mat, 0.0, 1e3, grid);
  for (const auto& pt : rep.points) CHECK(std::abs(pt.full.value()) < 1e-12);
  CHECK(rep.max_chi_im_deviation == doctest::Approx(1.0));

  const std::vector<double> single{0.0};
  const auto one = validate_reduction(mat, 0.0, 1e3, single);
  CHECK(one.points_compared == 1);
  CHECK(std::isfinite(one.max_chi_im_deviation));
}
