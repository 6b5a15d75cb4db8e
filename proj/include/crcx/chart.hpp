#pragma once

// Chart specification: a coordinate box, the raw generating section Z_raw of
// the (1,0) bundle as three coordinate components, the contact form as three
// real coefficient expressions, and optionally the components of a candidate
// immersion. Charts are written in a small sectioned text format:
//
//   name = cylinder
//   [domain]
//   u1 = -3.0 3.0
//   [Z]
//   Z1 = 1
//   Z2 = i*sin(u1)
//   Z3 = -i*cos(u1)
//   [theta]
//   theta1 = 0
//   theta2 = cos(u1)
//   theta3 = sin(u1)
//   [immersion]
//   f1 = cos(u1)
//   ...

#include <array>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "crcx/errors.hpp"
#include "crcx/expr.hpp"
#include "crcx/halton.hpp"

namespace crcx {

struct ChartSpec {
  std::string name;
  Box domain;
  std::array<ExprPtr, 3> z_raw;
  std::array<ExprPtr, 3> theta;
  std::vector<ExprPtr> immersion;  // empty when the chart carries no map

  bool contains(const std::array<double, 3>& p) const {
    for (int i = 0; i < 3; ++i)
      if (p[static_cast<std::size_t>(i)] < domain.lo[static_cast<std::size_t>(i)] ||
          p[static_cast<std::size_t>(i)] > domain.hi[static_cast<std::size_t>(i)])
        return false;
    return true;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline ChartSpec parse_chart(const std::string& text, const std::string& origin = "<chart>") {
  ChartSpec spec;
  std::array<bool, 3> have_z{}, have_theta{}, have_domain{};
  std::vector<std::pair<int, ExprPtr>> immersion_parts;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  std::string section;

  auto err = [&](const std::string& msg) -> CalcError {
    return CalcError(errc::chart_parse_error,
                     origin + ":" + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = detail::trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw err("unterminated section header");
      section = line.substr(1, line.size() - 2);
      if (section != "domain" && section != "Z" && section != "theta" && section != "immersion")
        throw err("unknown section [" + section + "]");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw err("expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));

    if (section.empty()) {
      if (key == "name") {
        spec.name = value;
        continue;
      }
      throw err("unknown top-level key '" + key + "'");
    }

    if (section == "domain") {
      int axis = -1;
      if (key == "u1") axis = 0;
      else if (key == "u2") axis = 1;
      else if (key == "u3") axis = 2;
      else throw err("domain key must be u1, u2 or u3");
      std::istringstream vv(value);
      double lo, hi;
      if (!(vv >> lo >> hi)) throw err("domain bounds must be two numbers");
      if (!(lo < hi)) throw err("domain bounds must satisfy lo < hi");
      spec.domain.lo[static_cast<std::size_t>(axis)] = lo;
      spec.domain.hi[static_cast<std::size_t>(axis)] = hi;
      have_domain[static_cast<std::size_t>(axis)] = true;
      continue;
    }

    ExprPtr e;
    try {
      e = parse(value);
    } catch (const ParseError& pe) {
      throw CalcError(errc::chart_parse_error, origin + ":" + std::to_string(lineno) + ": " +
                                                   pe.what());
    }

    if (section == "Z") {
      int idx = -1;
      if (key == "Z1") idx = 0;
      else if (key == "Z2") idx = 1;
      else if (key == "Z3") idx = 2;
      else throw err("Z key must be Z1, Z2 or Z3");
      spec.z_raw[static_cast<std::size_t>(idx)] = e;
      have_z[static_cast<std::size_t>(idx)] = true;
    } else if (section == "theta") {
      int idx = -1;
      if (key == "theta1") idx = 0;
      else if (key == "theta2") idx = 1;
      else if (key == "theta3") idx = 2;
      else throw err("theta key must be theta1, theta2 or theta3");
      spec.theta[static_cast<std::size_t>(idx)] = e;
      have_theta[static_cast<std::size_t>(idx)] = true;
    } else if (section == "immersion") {
      if (key.size() < 2 || key[0] != 'f') throw err("immersion keys are f1, f2, ...");
      int idx = 0;
      for (std::size_t n = 1; n < key.size(); ++n) {
        if (!std::isdigit(static_cast<unsigned char>(key[n])))
          throw err("immersion keys are f1, f2, ...");
        idx = idx * 10 + (key[n] - '0');
      }
      if (idx < 1) throw err("immersion component index must be >= 1");
      immersion_parts.emplace_back(idx, e);
    }
  }

  for (int i = 0; i < 3; ++i) {
    if (!have_domain[static_cast<std::size_t>(i)])
      throw CalcError(errc::chart_parse_error, origin + ": missing domain bound for u" +
                                                   std::to_string(i + 1));
    if (!have_z[static_cast<std::size_t>(i)])
      throw CalcError(errc::chart_parse_error,
                      origin + ": missing Z" + std::to_string(i + 1));
    if (!have_theta[static_cast<std::size_t>(i)])
      throw CalcError(errc::chart_parse_error,
                      origin + ": missing theta" + std::to_string(i + 1));
  }
  if (!immersion_parts.empty()) {
    spec.immersion.resize(immersion_parts.size());
    for (const auto& [idx, e] : immersion_parts) {
      if (idx > static_cast<int>(immersion_parts.size()))
        throw CalcError(errc::chart_parse_error,
                        origin + ": immersion components must be f1..fn without gaps");
      spec.immersion[static_cast<std::size_t>(idx - 1)] = e;
    }
    for (const auto& e : spec.immersion)
      if (!e)
        throw CalcError(errc::chart_parse_error,
                        origin + ": immersion components must be f1..fn without gaps");
  }
  return spec;
}

inline std::string chart_to_text(const ChartSpec& spec) {
  std::string out;
  out += "name = " + spec.name + "\n\n[domain]\n";
  char buf[64];
  for (int i = 0; i < 3; ++i) {
    std::snprintf(buf, sizeof buf, "u%d = %.17g %.17g\n", i + 1,
                  spec.domain.lo[static_cast<std::size_t>(i)],
                  spec.domain.hi[static_cast<std::size_t>(i)]);
    out += buf;
  }
  out += "\n[Z]\n";
  for (int i = 0; i < 3; ++i)
    out += "Z" + std::to_string(i + 1) + " = " + print(spec.z_raw[static_cast<std::size_t>(i)]) + "\n";
  out += "\n[theta]\n";
  for (int i = 0; i < 3; ++i)
    out += "theta" + std::to_string(i + 1) + " = " +
           print(spec.theta[static_cast<std::size_t>(i)]) + "\n";
  if (!spec.immersion.empty()) {
    out += "\n[immersion]\n";
    for (std::size_t n = 0; n < spec.immersion.size(); ++n)
      out += "f" + std::to_string(n + 1) + " = " + print(spec.immersion[n]) + "\n";
  }
  return out;
}

}  // namespace crcx
