// Command-line front end: run verification suites on built-in models or user
// chart files, evaluate expressions and frame functions as jet tables, and
// export the built-in charts.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crcx/frame.hpp"
#include "crcx/models.hpp"
#include "crcx/run.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw crcx::CalcError(crcx::errc::config_error, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::array<double, 3> parse_point(const std::string& s) {
  const auto parts = split_list(s);
  if (parts.size() != 3)
    throw crcx::CalcError(crcx::errc::config_error, "point must be x,y,z");
  std::array<double, 3> p{};
  for (int i = 0; i < 3; ++i) {
    try {
      p[static_cast<std::size_t>(i)] = std::stod(parts[static_cast<std::size_t>(i)]);
    } catch (const std::exception&) {
      throw crcx::CalcError(crcx::errc::config_error,
                            "bad coordinate '" + parts[static_cast<std::size_t>(i)] + "'");
    }
  }
  return p;
}

void print_jet_table(const crcx::Jet& j) {
  std::printf("order %d at (%.17g, %.17g, %.17g)\n", j.order(), j.base_point()[0],
              j.base_point()[1], j.base_point()[2]);
  std::printf("%-10s %-28s %s\n", "index", "taylor coefficient", "derivative");
  for (int d = 0; d <= j.order(); ++d)
    for (int i = d; i >= 0; --i)
      for (int jj = d - i; jj >= 0; --jj) {
        const int k = d - i - jj;
        const crcx::cplx c = j.coeff(i, jj, k);
        const crcx::cplx dv = j.derivative(i, jj, k);
        std::printf("(%d,%d,%d)    %- 12.6g %+.6gi    %- 12.6g %+.6gi\n", i, jj, k, c.real(),
                    c.imag(), dv.real(), dv.imag());
      }
}

struct RunCli {
  std::string model, chart, suites, tol_list, format = "json", out;
  int points = 200;
  std::uint64_t seed = 0;
  int order = 5;
};

int do_run(const RunCli& rc) {
  crcx::RunConfig cfg;
  cfg.model = rc.model;
  if (!rc.chart.empty()) {
    cfg.chart_text = read_file(rc.chart);
    cfg.chart_origin = rc.chart;
  }
  if (!rc.suites.empty() && rc.suites != "all") cfg.suites = split_list(rc.suites);
  cfg.points = rc.points;
  cfg.seed = rc.seed;
  cfg.order = rc.order;
  cfg.format = rc.format;
  for (const auto& kv : split_list(rc.tol_list)) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw crcx::CalcError(crcx::errc::config_error, "tolerance override must be SUITE=VALUE");
    try {
      cfg.tolerances[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw crcx::CalcError(crcx::errc::config_error, "bad tolerance value in '" + kv + "'");
    }
  }

  const crcx::RunResult res = crcx::run(cfg);
  if (rc.out.empty()) {
    std::fputs(res.document.c_str(), stdout);
  } else {
    std::ofstream f(rc.out, std::ios::binary);
    if (!f) throw crcx::CalcError(crcx::errc::config_error, "cannot write '" + rc.out + "'");
    f << res.document;
  }
  return res.all_pass ? 0 : 1;
}

struct EvalCli {
  std::string model, chart, expr, frame_fn, point = "0,0,0";
  int order = 5;
};

int do_eval(const EvalCli& ec) {
  crcx::ChartSpec chart;
  if (!ec.model.empty()) {
    chart = crcx::model(ec.model).chart;
  } else if (!ec.chart.empty()) {
    chart = crcx::parse_chart(read_file(ec.chart), ec.chart);
  } else if (ec.frame_fn.empty()) {
    // Bare expression evaluation needs no chart.
    chart.domain.lo = {-1e30, -1e30, -1e30};
    chart.domain.hi = {1e30, 1e30, 1e30};
  } else {
    throw crcx::CalcError(crcx::errc::config_error, "--frame needs --model or --chart");
  }
  const auto p = parse_point(ec.point);

  if (!ec.frame_fn.empty()) {
    const crcx::FrameData f = crcx::build_frame(chart, p, ec.order);
    crcx::Jet j;
    if (ec.frame_fn == "a") j = f.a;
    else if (ec.frame_fn == "b") j = f.b;
    else if (ec.frame_fn == "c") j = f.c;
    else if (ec.frame_fn == "levi")
      j = crcx::Jet::constant(0, f.levi_raw, p);
    else
      throw crcx::CalcError(crcx::errc::config_error, "frame function must be a, b, c or levi");
    print_jet_table(j);
    return 0;
  }
  if (ec.expr.empty())
    throw crcx::CalcError(crcx::errc::config_error, "eval needs --expr or --frame");
  const auto ast = crcx::parse(ec.expr);
  print_jet_table(crcx::eval(ast, p, ec.order));
  return 0;
}

int do_export(const std::string& dir) {
  for (const auto& name : crcx::model_names()) {
    const std::string path = dir + "/" + name + ".chart";
    std::ofstream f(path, std::ios::binary);
    if (!f) throw crcx::CalcError(crcx::errc::config_error, "cannot write '" + path + "'");
    f << crcx::model_config_text(name);
    std::fprintf(stderr, "wrote %s\n", path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frame calculus verification toolkit for three-dimensional "
               "strongly pseudoconvex pseudohermitian structures"};
  app.require_subcommand(1);

  RunCli rc;
  auto* run_cmd = app.add_subcommand("run", "run verification suites and emit a report");
  auto* model_opt = run_cmd->add_option("--model", rc.model, "built-in model name");
  run_cmd->add_option("--chart", rc.chart, "chart file")->excludes(model_opt);
  run_cmd->add_option("--suite", rc.suites,
                      "comma-separated list from {frame, complex, weierstrass, pluriharmonic, "
                      "harmonicity, classify}; default: all applicable");
  run_cmd->add_option("--points", rc.points, "sample count (default 200)");
  run_cmd->add_option("--seed", rc.seed, "Halton sequence offset (default 0)");
  run_cmd->add_option("--order", rc.order, "jet order K (default 5, max 8)");
  run_cmd->add_option("--tol", rc.tol_list, "per-suite overrides SUITE=VALUE, comma separated");
  run_cmd->add_option("--format", rc.format, "json | csv | text (default json)");
  run_cmd->add_option("--out", rc.out, "output file (default stdout)");

  EvalCli ec;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate an expression or frame function as a jet");
  eval_cmd->add_option("--model", ec.model, "built-in model name");
  eval_cmd->add_option("--chart", ec.chart, "chart file");
  eval_cmd->add_option("--expr", ec.expr, "expression to evaluate");
  eval_cmd->add_option("--frame", ec.frame_fn, "frame function: a, b, c or levi");
  eval_cmd->add_option("--point", ec.point, "evaluation point x,y,z");
  eval_cmd->add_option("--order", ec.order, "jet order (default 5)");

  std::string export_dir = ".";
  auto* export_cmd = app.add_subcommand("export-models", "write built-in charts as chart files");
  export_cmd->add_option("--dir", export_dir, "output directory (default .)");

  auto* list_cmd = app.add_subcommand("list-models", "list built-in model names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return do_run(rc);
    if (eval_cmd->parsed()) return do_eval(ec);
    if (export_cmd->parsed()) return do_export(export_dir);
    if (list_cmd->parsed()) {
      for (const auto& name : crcx::model_names()) std::printf("%s\n", name.c_str());
      return 0;
    }
  } catch (const crcx::CalcError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
