#include <catch2/catch_amalgamated.hpp>

#include "crcx/immersion.hpp"
#include "crcx/models.hpp"
#include "support/fuzz.hpp"

using crcx::build_frame;
using crcx::cplx;
using crcx::FrameData;

TEST_CASE("model registry") {
  CHECK(crcx::model_names().size() == 5);
  CHECK_THROWS_MATCHES(crcx::model("torus"), crcx::CalcError,
                       Catch::Matchers::Predicate<crcx::CalcError>([](const crcx::CalcError& e) {
                         return e.code() == crcx::errc::unknown_model;
                       }));
  for (const auto& name : crcx::model_names()) {
    const auto d = crcx::model(name);
    CHECK(d.name == name);
    CHECK_FALSE(d.notes.empty());
  }
}

TEST_CASE("sphere embedding lies on the radius-2 sphere") {
  const auto m = crcx::model("sphere");
  for (const auto& p : crcx::sample_box(m.chart.domain, 50, 0)) {
    double r2 = 0;
    for (const auto& comp : m.chart.immersion) {
      const double v = crcx::eval(comp, p, 0).value().real();
      r2 += v * v;
    }
    CHECK(std::abs(r2 - 4.0) < 1e-12);
  }
}

TEST_CASE("cylinder embedding lies on the unit tube") {
  for (const auto* name : {"cylinder", "cylinder_pregauge"}) {
    const auto m = crcx::model(name);
    for (const auto& p : crcx::sample_box(m.chart.domain, 50, 0)) {
      const double x1 = crcx::eval(m.chart.immersion[0], p, 0).value().real();
      const double x3 = crcx::eval(m.chart.immersion[2], p, 0).value().real();
      CHECK(std::abs(x1 * x1 + x3 * x3 - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("Sasakian flags: sphere and flat model yes, cylinder no") {
  for (const auto& name : crcx::model_names()) {
    const auto m = crcx::model(name);
    double c_max = 0;
    for (const auto& p : crcx::sample_box(m.chart.domain, 40, 0)) {
      const FrameData f = build_frame(m.chart, p, 3);
      c_max = std::max(c_max, std::abs(f.c.value()));
    }
    INFO(name << " max|c| = " << c_max);
    if (m.sasakian_expected) {
      CHECK(c_max < 1e-9);
    } else {
      CHECK(std::abs(c_max - 0.5) < 1e-9);
    }
  }
}

TEST_CASE("every model chart passes the structure equation suite") {
  for (const auto& name : crcx::model_names()) {
    const auto m = crcx::model(name);
    for (const auto& p : crcx::sample_box(m.chart.domain, 60, 0)) {
      const auto r = crcx::verify_structure_equations(build_frame(m.chart, p, 4));
      INFO(name);
      CHECK(r.max_residual() < 1e-8);
    }
  }
}

TEST_CASE("shipped embeddings are isometric") {
  for (const auto* name : {"sphere", "sphere_alt", "cylinder", "cylinder_pregauge"}) {
    const auto m = crcx::model(name);
    const auto imm = crcx::ImmersionMap::from_chart(m.chart);
    const crcx::ImmersionChecker ck(imm, crcx::sample_box(m.chart.domain, 25, 0), 5, 0);
    const auto iso = crcx::isometry_check(ck, 1e-8);
    INFO(name << " residual " << iso.max_residual);
    CHECK(iso.pass);
  }
}

TEST_CASE("sphere chart overlap: same points, gauge angle pi") {
  const auto a = crcx::model("sphere");
  const auto b = crcx::model("sphere_alt");
  for (const auto& p : crcx::sample_box(a.chart.domain, 25, 3)) {
    const auto q = crcx::sphere_overlap_map(p);
    if (!b.chart.contains(q)) continue;

    // Same ambient point.
    for (int n = 0; n < 4; ++n) {
      const double fa = crcx::eval(a.chart.immersion[static_cast<std::size_t>(n)], p, 0).value().real();
      const double fb = crcx::eval(b.chart.immersion[static_cast<std::size_t>(n)], q, 0).value().real();
      CHECK(std::abs(fa - fb) < 1e-12);
    }

    // Structure functions transform by the constant gauge v = pi:
    // a -> -a, b -> b, c -> c.
    const FrameData fa = build_frame(a.chart, p, 4);
    const FrameData fb = build_frame(b.chart, q, 4);
    CHECK(std::abs(fa.a.value() + fb.a.value()) < 1e-8);
    CHECK(std::abs(fa.b.value() - fb.b.value()) < 1e-8);
    CHECK(std::abs(fa.c.value() - fb.c.value()) < 1e-8);

    // The pushed-forward sections are opposite: Z_b f = -Z_a f.
    const auto imm_a = crcx::ImmersionMap::from_chart(a.chart);
    const auto imm_b = crcx::ImmersionMap::from_chart(b.chart);
    for (int n = 0; n < 4; ++n) {
      const crcx::Jet ja = crcx::eval(imm_a.components[static_cast<std::size_t>(n)], p, 3);
      const crcx::Jet jb = crcx::eval(imm_b.components[static_cast<std::size_t>(n)], q, 3);
      const cplx za = crcx::Zf(fa, ja).value();
      const cplx zb = crcx::Zf(fb, jb).value();
      CHECK(std::abs(za + zb) < 1e-9);
    }
  }
}

TEST_CASE("model configs round-trip through the chart format") {
  for (const auto& name : crcx::model_names()) {
    const auto spec = crcx::parse_chart(crcx::model_config_text(name), name);
    const auto round = crcx::parse_chart(crcx::chart_to_text(spec), name);
    for (int i = 0; i < 3; ++i) {
      CHECK(crcx::expr_equal(spec.z_raw[static_cast<std::size_t>(i)],
                             round.z_raw[static_cast<std::size_t>(i)]));
      CHECK(crcx::expr_equal(spec.theta[static_cast<std::size_t>(i)],
                             round.theta[static_cast<std::size_t>(i)]));
    }
    CHECK(spec.immersion.size() == round.immersion.size());
  }
}
