#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "crcx/immersion.hpp"
#include "crcx/models.hpp"
#include "support/fuzz.hpp"
#include "support/oracles.hpp"

using crcx::Classification;
using crcx::cplx;
using crcx::ImmersionChecker;
using crcx::ImmersionMap;
using crcx::Jet;

namespace {

ImmersionChecker make_checker(const std::string& model_name, int points, int order = 5,
                              std::uint64_t seed = 0) {
  const auto m = crcx::model(model_name);
  const auto imm = ImmersionMap::from_chart(m.chart);
  return ImmersionChecker(imm, crcx::sample_box(m.chart.domain, points, seed), order, seed);
}

}  // namespace

TEST_CASE("sphere embedding satisfies all five representation conditions") {
  const auto ck = make_checker("sphere", 40);
  const auto reps = crcx::weierstrass_check(ck, 1e-8);
  for (const auto& r : reps) {
    INFO(r.id << " residual " << r.max_residual);
    CHECK(r.pass);
  }
}

TEST_CASE("cylinder embedding satisfies all five representation conditions") {
  const auto ck = make_checker("cylinder", 40);
  const auto reps = crcx::weierstrass_check(ck, 1e-8);
  for (const auto& r : reps) {
    INFO(r.id << " residual " << r.max_residual);
    CHECK(r.pass);
  }
}

TEST_CASE("scaling the sphere embedding breaks exactly the norm condition") {
  const auto m = crcx::model("sphere");
  const auto imm = ImmersionMap::from_chart(m.chart).scaled(1.1);
  const ImmersionChecker ck(imm, crcx::sample_box(m.chart.domain, 25, 0), 5, 0);
  const auto reps = crcx::weierstrass_check(ck, 1e-8);
  CHECK(reps[0].pass);  // integrability survives scaling
  CHECK_FALSE(reps[2].pass);
  CHECK(std::abs(reps[2].max_residual - 0.21) < 1e-9);   // ||phi||^2 = 1.21
  CHECK(std::abs(reps[2].mean_residual - 0.21) < 1e-9);
  const auto iso = crcx::isometry_check(ck, 1e-8);
  CHECK_FALSE(iso.pass);
  CHECK(std::abs(iso.max_residual - 0.21) < 1e-9);
}

TEST_CASE("both model embeddings are isometric") {
  for (const auto* name : {"sphere", "cylinder"}) {
    const auto ck = make_checker(name, 40);
    const auto iso = crcx::isometry_check(ck, 1e-8);
    INFO(name << " residual " << iso.max_residual);
    CHECK(iso.pass);
  }
}

TEST_CASE("representation conditions and the isometry system agree on perturbed maps") {
  // Cross-oracle: for randomly perturbed maps either both checkers accept or
  // both reject at the same tolerance.
  const auto m = crcx::model("sphere");
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double eps = (trial % 4 == 0) ? 0.0 : 1e-3 * std::abs(amp(rng));
    auto imm = ImmersionMap::from_chart(m.chart);
    const int comp = trial % 4;
    imm.components[static_cast<std::size_t>(comp)] = crcx::Expr::binary(
        crcx::Expr::Binary::add, imm.components[static_cast<std::size_t>(comp)],
        crcx::Expr::binary(crcx::Expr::Binary::mul, crcx::Expr::literal(eps, false),
                           crcx::parse("sin(u1 + 0.7*u2)*cos(u3)")));
    const ImmersionChecker ck(imm, crcx::sample_box(m.chart.domain, 15, 11), 5, 11);
    const double tol = 1e-7;
    const auto w = crcx::weierstrass_check(ck, tol);
    bool w_pass = true;
    for (const auto& r : w) w_pass = w_pass && r.pass;
    const bool iso_pass = crcx::isometry_check(ck, tol).pass;
    INFO("trial " << trial << " eps " << eps);
    CHECK(w_pass == iso_pass);
    CHECK(w_pass == (eps == 0.0));
  }
}

TEST_CASE("pluriharmonicity: models pass, u3^2 on the flat model fails") {
  for (const auto* name : {"sphere", "cylinder"}) {
    const auto ck = make_checker(name, 30);
    const auto reps = crcx::pluriharmonic_check(ck, 1e-8);
    INFO(name);
    CHECK(reps[0].pass);
    CHECK(reps[1].pass);
  }

  // u3^2 is not CR pluriharmonic: the residual of condition (2) is
  // sqrt(2)*|z| pointwise, far above threshold over the box.
  const auto heis = crcx::model("heisenberg");
  ImmersionMap imm{heis.chart, {crcx::parse("u3^2"), crcx::parse("u1"), crcx::parse("u2")}};
  const ImmersionChecker ck(imm, crcx::sample_box(heis.chart.domain, 30, 0), 5, 0);
  const auto reps = crcx::pluriharmonic_check(ck, 1e-8);
  CHECK_FALSE(reps[0].pass);
  CHECK(reps[0].max_residual > 1e-3);
  // Both equivalent conditions agree pointwise in magnitude for real maps.
  for (int n = 0; n < reps[0].points; ++n)
    CHECK(std::abs(reps[0].per_point[static_cast<std::size_t>(n)] -
                   reps[1].per_point[static_cast<std::size_t>(n)]) < 1e-10);

  // The expected magnitude sqrt(2)|z| at the worst sample.
  double want = 0;
  for (const auto& p : crcx::sample_box(heis.chart.domain, 30, 0))
    want = std::max(want, std::sqrt(2.0) * std::hypot(p[0], p[1]));
  CHECK(std::abs(reps[0].max_residual - want) < 1e-9);
}

TEST_CASE("the real part of a CR function is pluriharmonic on the flat model") {
  const auto heis = crcx::model("heisenberg");
  // Re(z) = u1 and Re(t + i|z|^2) = u3 are both real parts of CR functions.
  ImmersionMap imm{heis.chart, {crcx::parse("u1"), crcx::parse("u3"), crcx::parse("u2")}};
  const ImmersionChecker ck(imm, crcx::sample_box(heis.chart.domain, 30, 0), 5, 0);
  const auto reps = crcx::pluriharmonic_check(ck, 1e-9);
  CHECK(reps[0].pass);
  CHECK(reps[1].pass);
}

TEST_CASE("integrability of exact classes and of perturbations") {
  const auto ck = make_checker("sphere", 20);
  const auto exact = crcx::integrability_check(
      ck, [](const ImmersionChecker::PointData& d) { return d.phi; }, 1e-8);
  CHECK(exact[0].pass);
  CHECK(exact[1].pass);

  // A non-exact perturbation fails proportionally to its size.
  auto perturbed = [](double eps) {
    return [eps](const ImmersionChecker::PointData& d) {
      std::vector<Jet> w = d.phi;
      const Jet bump = crcx::eval(crcx::parse("u1*u2 + u3"), d.fr.point, w[0].order());
      w[0] = w[0] + crcx::Jet::constant(w[0].order(), cplx(eps, 0), d.fr.point) * bump;
      return w;
    };
  };
  const auto r1 = crcx::integrability_check(ck, perturbed(1e-4), 1e-8);
  const auto r2 = crcx::integrability_check(ck, perturbed(2e-4), 1e-8);
  CHECK_FALSE(r1[1].pass);
  CHECK(r1[1].max_residual > 1e-6);
  const double ratio = r2[1].max_residual / r1[1].max_residual;
  CHECK(std::abs(ratio - 2.0) < 0.05);
}

TEST_CASE("harmonicity chain on the sphere") {
  const auto ck = make_checker("sphere", 40);
  const auto h = crcx::harmonicity_chain(ck, 1e-8);
  CHECK(h.h1.pass);
  CHECK(h.h2.pass);
  CHECK(h.h3.pass);
  CHECK(h.n_is_4);
  CHECK(h.h4.pass);
  CHECK(h.implications_consistent);
  CHECK(std::abs(h.norm_dr_mean - 1.0) < 1e-6);
  CHECK(h.norm_dr_std < 1e-8);
  CHECK(std::abs(h.norm_dgl2_mean - 0.5) < 1e-6);
  CHECK(std::abs(h.norm_zbar_dgl2_mean - 0.25) < 1e-6);
  CHECK(std::abs(h.norm_t_dgl2_mean - 0.125) < 1e-6);
}

TEST_CASE("harmonicity chain on the cylinder") {
  const auto ck = make_checker("cylinder", 40);
  const auto h = crcx::harmonicity_chain(ck, 1e-8);
  CHECK(h.h1.pass);
  CHECK(h.h2.pass);
  CHECK(h.h3.pass);
  CHECK(h.h4.pass);
  CHECK(std::abs(h.norm_dr_mean - 1.0) < 1e-6);
  CHECK(std::abs(h.norm_dgl2_mean - 0.5) < 1e-6);
}

TEST_CASE("a non-pluriharmonic near-isometry keeps the implication order") {
  const auto m = crcx::model("sphere");
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 6; ++trial) {
    auto imm = ImmersionMap::from_chart(m.chart);
    const double eps = 2e-3;
    imm.components[0] = crcx::Expr::binary(
        crcx::Expr::Binary::add, imm.components[0],
        crcx::Expr::binary(crcx::Expr::Binary::mul, crcx::Expr::literal(eps, false),
                           crcx_test::random_smooth_function(rng)));
    const ImmersionChecker ck(imm, crcx::sample_box(m.chart.domain, 10, 17), 5, 17);
    // Loose prerequisite so the chain runs on the perturbed map.
    const auto h = crcx::harmonicity_chain(ck, 1e-8, /*isometry_tol=*/0.1);
    CHECK_FALSE(h.h1.pass);
    CHECK(h.implications_consistent);
  }
}

TEST_CASE("prerequisite failure is reported for non-isometric maps") {
  const auto m = crcx::model("sphere");
  const auto imm = ImmersionMap::from_chart(m.chart).scaled(1.1);
  const ImmersionChecker ck(imm, crcx::sample_box(m.chart.domain, 10, 0), 5, 0);
  CHECK_THROWS_MATCHES(crcx::harmonicity_chain(ck, 1e-8), crcx::CalcError,
                       Catch::Matchers::Predicate<crcx::CalcError>([](const crcx::CalcError& e) {
                         return e.code() == crcx::errc::prerequisite_failed;
                       }));
}

TEST_CASE("isotropy pairings vanish on both models") {
  for (const auto* name : {"sphere", "cylinder"}) {
    const auto ck = make_checker(name, 30);
    const auto reps = crcx::isotropy_check(ck, 1e-8);
    for (const auto& r : reps) {
      INFO(name << " " << r.id << " " << r.max_residual);
      CHECK(r.pass);
    }
  }
}

TEST_CASE("isotropy requires n = 4") {
  const auto heis = crcx::model("heisenberg");
  ImmersionMap imm{heis.chart, {crcx::parse("u1"), crcx::parse("u2"), crcx::parse("u3")}};
  const ImmersionChecker ck(imm, crcx::sample_box(heis.chart.domain, 5, 0), 5, 0);
  CHECK_THROWS_MATCHES(crcx::isotropy_check(ck, 1e-8), crcx::CalcError,
                       Catch::Matchers::Predicate<crcx::CalcError>([](const crcx::CalcError& e) {
                         return e.code() == crcx::errc::wrong_dimension;
                       }));
}

TEST_CASE("principal curvature spectra of the two endpoints") {
  const auto sph = make_checker("sphere", 25);
  const auto s1 = crcx::shape_spectrum(sph, 1e-6);
  for (const auto& e : s1.eigenvalues)
    for (int i = 0; i < 3; ++i) CHECK(std::abs(e[static_cast<std::size_t>(i)] - 0.5) < 1e-6);
  CHECK(s1.symmetry_residual < 1e-8);
  CHECK(s1.trace_residual < 1e-8);

  const auto cyl = make_checker("cylinder", 25);
  const auto s2 = crcx::shape_spectrum(cyl, 1e-6);
  for (const auto& e : s2.eigenvalues) {
    CHECK(std::abs(e[0] - 1.0) < 1e-6);
    CHECK(std::abs(e[1]) < 1e-6);
    CHECK(std::abs(e[2]) < 1e-6);
  }
  CHECK(s2.trace_residual < 1e-8);
}

TEST_CASE("trace of the shape operator matches the contact Laplacian norm") {
  // h(X,X) + h(Y,Y) = ||Delta_R f|| with the chosen normal orientation.
  for (const auto* name : {"sphere", "cylinder"}) {
    const auto ck = make_checker(name, 10);
    const auto s = crcx::shape_spectrum(ck, 1e-6);
    const auto h = crcx::harmonicity_chain(ck, 1e-6);
    for (const auto& e : s.eigenvalues) {
      // tr h = h(T,T) + ||Delta_R f||; on both endpoints h(T,T) equals the
      // smallest (cylinder) resp. equal (sphere) eigenvalue.
      const double tr = e[0] + e[1] + e[2];
      const double htt = (std::string(name) == "sphere") ? 0.5 : 0.0;
      CHECK(std::abs(tr - (htt + h.norm_dr_mean)) < 1e-6);
    }
  }
}

TEST_CASE("classification returns the expected endpoint verdicts") {
  const auto sph = make_checker("sphere", 30);
  const auto r1 = crcx::classify(sph, 1e-6);
  CHECK(r1.verdict == Classification::Sphere);
  CHECK(r1.c_max < 1e-9);
  CHECK(r1.f_minus_2dr_std < 1e-8);

  const auto cyl = make_checker("cylinder", 30);
  const auto r2 = crcx::classify(cyl, 1e-6);
  CHECK(r2.verdict == Classification::Cylinder);
  CHECK(r2.gauge_b_residual < 1e-9);
  CHECK(r2.gauge_c_residual < 1e-9);

  // Tolerance below float noise: inconclusive by construction.
  const auto r3 = crcx::classify(sph, 1e-15);
  CHECK(r3.verdict == Classification::Inconclusive);
}

TEST_CASE("classification prerequisites") {
  const auto m = crcx::model("sphere");
  const auto imm = ImmersionMap::from_chart(m.chart).scaled(1.1);
  const ImmersionChecker ck(imm, crcx::sample_box(m.chart.domain, 10, 0), 5, 0);
  CHECK_THROWS_MATCHES(crcx::classify(ck, 1e-6), crcx::CalcError,
                       Catch::Matchers::Predicate<crcx::CalcError>([](const crcx::CalcError& e) {
                         return e.code() == crcx::errc::prerequisite_failed;
                       }));
}

TEST_CASE("cylinder branch identities") {
  const auto ck = make_checker("cylinder", 25);
  const auto b = crcx::cylinder_branch_check(ck, 1e-6);
  CHECK(b.y_dgl.pass);
  CHECK(b.x_dgl.pass);
  CHECK(b.xx.pass);
  CHECK(b.xxx.pass);
  CHECK(b.xxxx.pass);
}

TEST_CASE("the shape operator rejects maps whose contact Laplacian is not normal") {
  const auto m = crcx::model("sphere");
  auto broken = ImmersionMap::from_chart(m.chart);
  broken.components[1] = crcx::Expr::binary(crcx::Expr::Binary::add, broken.components[1],
                                            crcx::parse("0.2*u1*u3"));
  const ImmersionChecker bad(broken, crcx::sample_box(m.chart.domain, 3, 0), 5, 0);
  CHECK_THROWS_MATCHES(crcx::shape_spectrum(bad, 1e-10), crcx::CalcError,
                       Catch::Matchers::Predicate<crcx::CalcError>([](const crcx::CalcError& e) {
                         return e.code() == crcx::errc::prerequisite_failed ||
                                e.code() == crcx::errc::non_symmetric;
                       }));
}

TEST_CASE("scaling the map scales the squared norm of phi exactly quadratically") {
  const auto m = crcx::model("sphere");
  for (double s : {0.5, 1.3, 2.0}) {
    const auto imm = ImmersionMap::from_chart(m.chart).scaled(s);
    const ImmersionChecker ck(imm, crcx::sample_box(m.chart.domain, 10, 0), 5, 0);
    const auto w = crcx::weierstrass_check(ck, 1e-8);
    // residual of condition (3') is | ||phi||^2 - 1 | = |s^2 - 1|
    CHECK(std::abs(w[2].max_residual - std::abs(s * s - 1.0)) < 1e-12);
    CHECK(std::abs(w[2].mean_residual - std::abs(s * s - 1.0)) < 1e-12);
  }
}
