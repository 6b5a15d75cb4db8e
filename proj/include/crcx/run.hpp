#pragma once

// Suite runner shared by the CLI and the tests: resolves a target (built-in
// model or chart file text), executes the selected verification suites over a
// deterministic Halton sample, and renders the report. Reports are
// byte-reproducible for identical configurations: fixed field order, fixed
// 17-significant-digit float formatting, no timestamps.

#include <cstdio>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "crcx/chart.hpp"
#include "crcx/errors.hpp"
#include "crcx/frame.hpp"
#include "crcx/glform.hpp"
#include "crcx/immersion.hpp"
#include "crcx/models.hpp"
#include "crcx/report.hpp"

namespace crcx {

struct Measurement {
  std::string id;
  double value = 0;
};

struct RunConfig {
  std::string model;                        // built-in model name, or
  std::string chart_text;                   // chart config text (already read)
  std::string chart_origin = "<chart>";     // for error messages
  std::vector<std::string> suites;          // empty = all applicable
  int points = 200;
  std::uint64_t seed = 0;
  int order = 5;
  std::map<std::string, double> tolerances; // per-suite overrides
  std::string format = "json";              // json | csv | text
};

struct RunResult {
  std::string document;
  bool all_pass = true;
  std::vector<ConditionReport> conditions;
  std::vector<Measurement> measurements;
  std::string classification;  // empty unless the classify suite ran
};

namespace detail {

inline const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> s = {"frame",        "complex",     "weierstrass",
                                             "pluriharmonic", "harmonicity", "classify"};
  return s;
}

inline int suite_min_order(const std::string& s) {
  if (s == "frame") return 3;
  if (s == "complex") return 4;
  if (s == "classify") return 5;
  return 4;  // weierstrass, pluriharmonic, harmonicity
}

inline bool suite_needs_immersion(const std::string& s) {
  return s == "weierstrass" || s == "pluriharmonic" || s == "harmonicity" || s == "classify";
}

inline double suite_tol(const RunConfig& cfg, const std::string& suite, double fallback) {
  const auto it = cfg.tolerances.find(suite);
  return it == cfg.tolerances.end() ? fallback : it->second;
}

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

// --- suite implementations --------------------------------------------------

struct SuiteContext {
  const RunConfig& cfg;
  const ChartSpec& chart;
  const std::vector<std::array<double, 3>>& points;
  FrameTolerances frame_tol;
  std::vector<ConditionReport>& conditions;
  std::vector<Measurement>& measurements;
  std::unique_ptr<ImmersionChecker> checker;  // lazily built, shared by suites
};

inline void run_frame_suite(SuiteContext& ctx) {
  const double tol = suite_tol(ctx.cfg, "frame", 1e-8);
  ConditionReport dtheta, dzeta, reality, jacobi, duality, reeb, levi, brackets;
  dtheta.id = "frame.dtheta";
  dtheta.anchor = "dtheta = i zeta^zetabar";
  dzeta.id = "frame.dzeta";
  dzeta.anchor = "dzeta = ia zeta^zetabar - b zeta^theta - c zetabar^theta";
  reality.id = "frame.reality";
  reality.anchor = "b + conj(b) = 0";
  jacobi.id = "frame.jacobi";
  jacobi.anchor = "iZc - iZbar b + Ta - ab - conj(a)c = 0";
  duality.id = "frame.duality";
  duality.anchor = "coframe * frame = identity";
  reeb.id = "frame.reeb";
  reeb.anchor = "theta(T) = 1, i_T dtheta = 0";
  levi.id = "frame.levi";
  levi.anchor = "L(Z,Z) = 1";
  brackets.id = "frame.brackets";
  brackets.anchor = "bracket expansion matches (a,b,c)";

  double c_max = 0;
  for (const auto& p : ctx.points) {
    const FrameData f = build_frame(ctx.chart, p, ctx.cfg.order, ctx.frame_tol);
    const auto r = verify_structure_equations(f);
    dtheta.add(r.dtheta);
    dzeta.add(r.dzeta);
    reality.add(r.reality);
    jacobi.add(r.jacobi);
    duality.add(r.duality);
    reeb.add(r.reeb);
    levi.add(r.levi);
    const auto s = structure_functions(f);
    brackets.add(s.residuals.max());
    c_max = std::max(c_max, std::abs(s.c.value()));
  }
  for (auto* rep : {&dtheta, &dzeta, &reality, &jacobi, &duality, &reeb, &levi, &brackets})
    ctx.conditions.push_back(rep->finalize(tol, ctx.cfg.seed));
  ctx.measurements.push_back({"frame.max_abs_c", c_max});
  ctx.measurements.push_back({"frame.sasakian", c_max < tol ? 1.0 : 0.0});
}

// Deterministic smooth test functions for the complex suite; kept here so the
// runner has no dependency on test-only code.
inline ExprPtr runner_smooth_function(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(-0.7, 0.7);
  auto lit = [](double v) { return Expr::literal(v, false); };
  auto add = [](ExprPtr a, ExprPtr b) { return Expr::binary(Expr::Binary::add, a, b); };
  auto mul = [](ExprPtr a, ExprPtr b) { return Expr::binary(Expr::Binary::mul, a, b); };
  ExprPtr sum = lit(amp(rng));
  for (int d = 1; d <= 3; ++d)
    for (int i = d; i >= 0; --i)
      for (int j = d - i; j >= 0; --j) {
        ExprPtr term = lit(amp(rng) * 0.6);
        for (int n = 0; n < i; ++n) term = mul(term, Expr::coordinate(0));
        for (int n = 0; n < j; ++n) term = mul(term, Expr::coordinate(1));
        for (int n = 0; n < d - i - j; ++n) term = mul(term, Expr::coordinate(2));
        sum = add(sum, term);
      }
  ExprPtr linear = add(add(mul(lit(amp(rng)), Expr::coordinate(0)),
                           mul(lit(amp(rng)), Expr::coordinate(1))),
                       mul(lit(amp(rng)), Expr::coordinate(2)));
  sum = add(sum, mul(lit(amp(rng)), Expr::call(Expr::Fn::sin, linear)));
  return sum;
}

inline void run_complex_suite(SuiteContext& ctx) {
  const double tol = suite_tol(ctx.cfg, "complex", 1e-8);
  const double tol_rel = suite_tol(ctx.cfg, "laplacian", 1e-10);

  ConditionReport ac_fn11, ac_fn20, ac_10, ac_01, closure, rel, reeb_rec, star2;
  ac_fn11.id = "complex.anticommute_fn_11";
  ac_fn11.anchor = "D'd''f + D''d'f = 0";
  ac_fn20.id = "complex.anticommute_fn_20";
  ac_fn20.anchor = "D'd'f + D+d''f = 0";
  ac_10.id = "complex.anticommute_10";
  ac_10.anchor = "d'D''g + d''D'g = 0 on (1,0)";
  ac_01.id = "complex.anticommute_01";
  ac_01.anchor = "d'D'h + d''D+h = 0 on (0,1)";
  closure.id = "complex.closure";
  closure.anchor = "both components of D(df) = 0";
  rel.id = "complex.laplacian_relation";
  rel.anchor = "Delta_R f = 2 Delta_GL f - iTf";
  reeb_rec.id = "complex.reeb_recovery";
  reeb_rec.anchor = "Tf = i delta'd'f - i delta''d''f";
  star2.id = "complex.star_involution";
  star2.anchor = "star(star(alpha)) = alpha";

  std::mt19937_64 rng(ctx.cfg.seed * 2654435761u + 99991);
  std::vector<ExprPtr> fns;
  for (int n = 0; n < 8; ++n) fns.push_back(runner_smooth_function(rng));

  for (const auto& p : ctx.points) {
    const FrameData fr = build_frame(ctx.chart, p, ctx.cfg.order, ctx.frame_tol);
    double r1 = 0, r2 = 0, r3 = 0, r4 = 0, rc = 0, rr = 0, rt = 0, rs = 0;
    for (const auto& fe : fns) {
      const Jet f = eval(fe, p, ctx.cfg.order);
      const GlForm ff = GlForm::scalar(Bidegree::e00, f);
      const GlForm dp = d_prime(fr, ff);
      const GlForm ds = d_second(fr, ff);

      r1 = std::max(r1, std::abs(detail::jsum({D_prime(fr, ds).coeff[0],
                                               D_second(fr, dp).coeff[0]}).value()));
      r2 = std::max(r2, std::abs(detail::jsum({D_prime(fr, dp).coeff[0],
                                               D_plus(fr, ds).coeff[0]}).value()));

      const Jet g = Zbarf(fr, f);  // generic coefficient with one order less
      const GlForm g10{Bidegree::e10, {g}};
      r3 = std::max(r3, std::abs(detail::jsum({d_prime_top(fr, D_second(fr, g10)).coeff[0],
                                               d_second_top(fr, D_prime(fr, g10)).coeff[0]})
                                     .value()));
      const GlForm g01{Bidegree::e01, {g.conj()}};
      r4 = std::max(r4, std::abs(detail::jsum({d_prime_top(fr, D_prime(fr, g01)).coeff[0],
                                               d_second_top(fr, D_plus(fr, g01)).coeff[0]})
                                     .value()));

      const auto dd = D_full(fr, dp, ds);
      rc = std::max({rc, std::abs(dd.f20.coeff[0].value()), std::abs(dd.f11.coeff[0].value())});

      const Jet lhs = laplacian_full(fr, f);
      const Jet rhs = detail::jsum({cplx(2, 0) * laplacian_gl(fr, f), cplx(0, -1) * Tf(fr, f)});
      rr = std::max(rr, std::abs(lhs.value() - rhs.value()));

      const Jet t1 = delta_prime(fr, dp).coeff[0];
      const Jet t2 = delta_second(fr, ds).coeff[0];
      rt = std::max(rt, std::abs(Tf(fr, f).value() -
                                 (cplx(0, 1) * t1 - cplx(0, 1) * t2).value()));

      for (Bidegree deg : {Bidegree::e00, Bidegree::e10, Bidegree::f11}) {
        const GlForm alpha{deg, {f}};
        rs = std::max(rs, star(star(alpha)).coeff[0].max_abs_diff(alpha.coeff[0]));
      }
    }
    ac_fn11.add(r1);
    ac_fn20.add(r2);
    ac_10.add(r3);
    ac_01.add(r4);
    closure.add(rc);
    rel.add(rr);
    reeb_rec.add(rt);
    star2.add(rs);
  }
  for (auto* rep : {&ac_fn11, &ac_fn20, &ac_10, &ac_01, &closure})
    ctx.conditions.push_back(rep->finalize(tol, ctx.cfg.seed));
  ctx.conditions.push_back(rel.finalize(tol_rel, ctx.cfg.seed));
  ctx.conditions.push_back(reeb_rec.finalize(suite_tol(ctx.cfg, "reeb_recovery", 1e-9), ctx.cfg.seed));
  ctx.conditions.push_back(star2.finalize(1e-300, ctx.cfg.seed));
}

inline const ImmersionChecker& checker_for(SuiteContext& ctx) {
  if (!ctx.checker) {
    const auto imm = ImmersionMap::from_chart(ctx.chart);
    ctx.checker = std::make_unique<ImmersionChecker>(imm, ctx.points, ctx.cfg.order,
                                                     ctx.cfg.seed, ctx.frame_tol);
  }
  return *ctx.checker;
}

inline void run_weierstrass_suite(SuiteContext& ctx) {
  const double tol = suite_tol(ctx.cfg, "weierstrass", 1e-8);
  const auto& ck = checker_for(ctx);
  for (auto& r : weierstrass_check(ck, tol)) ctx.conditions.push_back(r);
  ctx.conditions.push_back(isometry_check(ck, tol));
  const auto integ = integrability_check(
      ck, [](const ImmersionChecker::PointData& d) { return d.phi; }, tol);
  ctx.conditions.push_back(integ[0]);
  ctx.conditions.push_back(integ[1]);
}

inline void run_pluriharmonic_suite(SuiteContext& ctx) {
  const double tol = suite_tol(ctx.cfg, "pluriharmonic", 1e-8);
  const auto& ck = checker_for(ctx);
  for (auto& r : pluriharmonic_check(ck, tol)) ctx.conditions.push_back(r);
}

inline void run_harmonicity_suite(SuiteContext& ctx) {
  const double tol = suite_tol(ctx.cfg, "harmonicity", 1e-8);
  const auto& ck = checker_for(ctx);
  const auto h = harmonicity_chain(ck, tol);
  ctx.conditions.push_back(h.h1);
  ctx.conditions.push_back(h.h2);
  ctx.conditions.push_back(h.h3);
  if (h.n_is_4) ctx.conditions.push_back(h.h4);
  ctx.measurements.push_back({"harmonicity.norm_dr_mean", h.norm_dr_mean});
  ctx.measurements.push_back({"harmonicity.norm_dr_std", h.norm_dr_std});
  ctx.measurements.push_back({"harmonicity.norm_dgl2_mean", h.norm_dgl2_mean});
  ctx.measurements.push_back({"harmonicity.norm_zbar_dgl2_mean", h.norm_zbar_dgl2_mean});
  ctx.measurements.push_back({"harmonicity.norm_t_dgl2_mean", h.norm_t_dgl2_mean});
  if (ck.dimension() == 4) {
    for (auto& r : isotropy_check(ck, tol)) ctx.conditions.push_back(r);
  }
}

inline std::string run_classify_suite(SuiteContext& ctx) {
  const double tol = suite_tol(ctx.cfg, "classify", 1e-6);
  const auto& ck = checker_for(ctx);
  const auto res = classify(ck, tol);
  ConditionReport verdict;
  verdict.id = "classify.verdict";
  verdict.anchor = "endpoint classification";
  verdict.add(res.verdict == Classification::Inconclusive ? 1.0 : 0.0);
  verdict.finalize(0.5, ctx.cfg.seed);
  ctx.conditions.push_back(verdict);
  ctx.measurements.push_back({"classify.max_abs_c", res.c_max});
  ctx.measurements.push_back({"classify.f_minus_2dr_std", res.f_minus_2dr_std});
  ctx.measurements.push_back({"classify.spectrum_1", res.spectrum[0]});
  ctx.measurements.push_back({"classify.spectrum_2", res.spectrum[1]});
  ctx.measurements.push_back({"classify.spectrum_3", res.spectrum[2]});
  ctx.measurements.push_back({"classify.gauge_b_residual", res.gauge_b_residual});
  ctx.measurements.push_back({"classify.gauge_c_residual", res.gauge_c_residual});
  return classification_name(res.verdict);
}

}  // namespace detail

// --- rendering ----------------------------------------------------------------

namespace detail {

inline std::string render_json(const RunConfig& cfg, const std::string& target,
                               const RunResult& res) {
  std::string o;
  o += "{\n";
  o += "  \"tool\": \"crcx\",\n";
  o += "  \"target\": \"" + json_escape(target) + "\",\n";
  o += "  \"config\": {\n";
  o += "    \"points\": " + std::to_string(cfg.points) + ",\n";
  o += "    \"seed\": " + std::to_string(cfg.seed) + ",\n";
  o += "    \"order\": " + std::to_string(cfg.order) + ",\n";
  o += "    \"suites\": [";
  for (std::size_t n = 0; n < cfg.suites.size(); ++n) {
    if (n) o += ", ";
    o += "\"" + json_escape(cfg.suites[n]) + "\"";
  }
  o += "],\n";
  o += "    \"tolerances\": {";
  bool first = true;
  for (const auto& [k, v] : cfg.tolerances) {
    if (!first) o += ", ";
    first = false;
    o += "\"" + json_escape(k) + "\": " + fmt17(v);
  }
  o += "}\n  },\n";
  o += "  \"conditions\": [\n";
  for (std::size_t n = 0; n < res.conditions.size(); ++n) {
    const auto& c = res.conditions[n];
    o += "    {\"id\": \"" + json_escape(c.id) + "\", \"anchor\": \"" + json_escape(c.anchor) +
         "\", \"max_residual\": " + fmt17(c.max_residual) +
         ", \"mean_residual\": " + fmt17(c.mean_residual) +
         ", \"tolerance\": " + fmt17(c.tolerance) +
         ", \"pass\": " + (c.pass ? "true" : "false") +
         ", \"points\": " + std::to_string(c.points) +
         ", \"seed\": " + std::to_string(c.seed) + "}";
    o += (n + 1 < res.conditions.size()) ? ",\n" : "\n";
  }
  o += "  ],\n";
  o += "  \"measurements\": [\n";
  for (std::size_t n = 0; n < res.measurements.size(); ++n) {
    const auto& m = res.measurements[n];
    o += "    {\"id\": \"" + json_escape(m.id) + "\", \"value\": " + fmt17(m.value) + "}";
    o += (n + 1 < res.measurements.size()) ? ",\n" : "\n";
  }
  o += "  ],\n";
  if (!res.classification.empty())
    o += "  \"classification\": \"" + json_escape(res.classification) + "\",\n";
  o += std::string("  \"all_pass\": ") + (res.all_pass ? "true" : "false") + "\n";
  o += "}\n";
  return o;
}

inline std::string render_csv(const RunResult& res) {
  std::string o = "kind,id,anchor,max_residual,mean_residual,tolerance,pass,value\n";
  auto csv_quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += "\"\"";
      else q += c;
    }
    return q + "\"";
  };
  for (const auto& c : res.conditions)
    o += "condition," + c.id + "," + csv_quote(c.anchor) + "," + fmt17(c.max_residual) + "," +
         fmt17(c.mean_residual) + "," + fmt17(c.tolerance) + "," + (c.pass ? "true" : "false") +
         ",\n";
  for (const auto& m : res.measurements)
    o += "measurement," + m.id + ",,,,,," + fmt17(m.value) + "\n";
  if (!res.classification.empty()) o += "classification," + res.classification + ",,,,,,\n";
  return o;
}

inline std::string render_text(const RunResult& res, const std::string& target) {
  std::string o = "target: " + target + "\n";
  char line[256];
  for (const auto& c : res.conditions) {
    std::snprintf(line, sizeof line, "%-32s %-4s  max %.3e  mean %.3e  tol %.1e\n", c.id.c_str(),
                  c.pass ? "ok" : "FAIL", c.max_residual, c.mean_residual, c.tolerance);
    o += line;
  }
  for (const auto& m : res.measurements) {
    std::snprintf(line, sizeof line, "%-32s value %.12g\n", m.id.c_str(), m.value);
    o += line;
  }
  if (!res.classification.empty()) o += "classification: " + res.classification + "\n";
  o += std::string("result: ") + (res.all_pass ? "all conditions pass" : "FAILURES present") + "\n";
  return o;
}

}  // namespace detail

// --- entry point ---------------------------------------------------------------

inline RunResult run(RunConfig cfg) {
  if (cfg.points < 1) throw CalcError(errc::config_error, "points must be >= 1");
  if (cfg.order > kMaxJetOrder)
    throw CalcError(errc::config_error, "order exceeds the supported maximum of 8");
  if (cfg.format != "json" && cfg.format != "csv" && cfg.format != "text")
    throw CalcError(errc::config_error, "format must be json, csv or text");
  if (cfg.model.empty() == cfg.chart_text.empty())
    throw CalcError(errc::config_error, "exactly one of model or chart must be given");

  ChartSpec chart;
  std::string target;
  if (!cfg.model.empty()) {
    chart = model(cfg.model).chart;
    target = cfg.model;
  } else {
    chart = parse_chart(cfg.chart_text, cfg.chart_origin);
    target = chart.name.empty() ? cfg.chart_origin : chart.name;
  }

  const bool has_immersion = !chart.immersion.empty();
  if (cfg.suites.empty()) {
    for (const auto& s : detail::known_suites())
      if (has_immersion || !detail::suite_needs_immersion(s)) cfg.suites.push_back(s);
  }
  for (const auto& s : cfg.suites) {
    bool known = false;
    for (const auto& k : detail::known_suites()) known = known || (k == s);
    if (!known) throw CalcError(errc::config_error, "unknown suite '" + s + "'");
    if (detail::suite_needs_immersion(s) && !has_immersion)
      throw CalcError(errc::config_error,
                      "suite '" + s + "' needs an immersion, and '" + target + "' has none");
    if (cfg.order < detail::suite_min_order(s))
      throw CalcError(errc::config_error,
                      "suite '" + s + "' needs jet order >= " +
                          std::to_string(detail::suite_min_order(s)) + ", got " +
                          std::to_string(cfg.order));
  }

  const auto points = sample_box(chart.domain, cfg.points, cfg.seed);

  FrameTolerances frame_tol;
  frame_tol.frame_tol = detail::suite_tol(cfg, "frame_tol", frame_tol.frame_tol);
  frame_tol.condition_limit = detail::suite_tol(cfg, "condition_limit", frame_tol.condition_limit);

  RunResult res;
  detail::SuiteContext ctx{cfg,            chart,            points, frame_tol,
                           res.conditions, res.measurements, nullptr};
  for (const auto& s : cfg.suites) {
    if (s == "frame") detail::run_frame_suite(ctx);
    else if (s == "complex") detail::run_complex_suite(ctx);
    else if (s == "weierstrass") detail::run_weierstrass_suite(ctx);
    else if (s == "pluriharmonic") detail::run_pluriharmonic_suite(ctx);
    else if (s == "harmonicity") detail::run_harmonicity_suite(ctx);
    else if (s == "classify") res.classification = detail::run_classify_suite(ctx);
  }
  for (const auto& c : res.conditions) res.all_pass = res.all_pass && c.pass;

  if (cfg.format == "json") res.document = detail::render_json(cfg, target, res);
  else if (cfg.format == "csv") res.document = detail::render_csv(res);
  else res.document = detail::render_text(res, target);
  return res;
}

}  // namespace crcx
