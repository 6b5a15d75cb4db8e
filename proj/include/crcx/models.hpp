#pragma once

// Built-in model charts. The manifolds come from the classification endpoints
// plus the flat control; the charts, contact-form scalings and section gauges
// are derived so that the frame normalization L(Z,Z)=1 holds and the shipped
// embeddings are isometric for the Webster metric. Each descriptor carries its
// derivation notes; the invariant suites validate every stated constant.

#include <string>
#include <vector>

#include "crcx/chart.hpp"
#include "crcx/errors.hpp"

namespace crcx {

struct ModelDescriptor {
  std::string name;
  ChartSpec chart;
  bool sasakian_expected = false;
  bool has_embedding = false;
  std::string notes;
};

namespace detail {

inline const char* kSphereConfig = R"cfg(# Round sphere of radius 2 in C^2, Hopf-type chart
# z = 2 cos(u1) e^{i u2}, w = 2 sin(u1) e^{i u3}
name = sphere

[domain]
u1 = 0.15 1.4207963267948966
u2 = -3 3
u3 = -3 3

[Z]
Z1 = 1
Z2 = i*sin(u1)/cos(u1)
Z3 = -i*cos(u1)/sin(u1)

[theta]
theta1 = 0
theta2 = 2*cos(u1)^2
theta3 = 2*sin(u1)^2

[immersion]
f1 = 2*cos(u1)*cos(u2)
f2 = 2*cos(u1)*sin(u2)
f3 = 2*sin(u1)*cos(u3)
f4 = 2*sin(u1)*sin(u3)
)cfg";

inline const char* kSphereAltConfig = R"cfg(# Second sphere chart: roles of z and w swapped.
# z = 2 sin(u1) e^{i u2}, w = 2 cos(u1) e^{i u3}; overlap map to the first
# chart is (u1,u2,u3) -> (pi/2 - u1, u2, u3) with constant gauge angle pi.
name = sphere_alt

[domain]
u1 = 0.15 1.4207963267948966
u2 = -3 3
u3 = -3 3

[Z]
Z1 = 1
Z2 = -i*cos(u1)/sin(u1)
Z3 = i*sin(u1)/cos(u1)

[theta]
theta1 = 0
theta2 = 2*sin(u1)^2
theta3 = 2*cos(u1)^2

[immersion]
f1 = 2*sin(u1)*cos(u2)
f2 = 2*sin(u1)*sin(u2)
f3 = 2*cos(u1)*cos(u3)
f4 = 2*cos(u1)*sin(u3)
)cfg";

inline const char* kCylinderConfig = R"cfg(# Tube (Re z)^2 + (Re w)^2 = 1 in C^2 with the complex structure
# J e1 = e2, J e3 = e4. Chart: f = (cos u1, u2, sin u1, u3).
# This gauge has a = 0 and constant b = c = i/2.
name = cylinder

[domain]
u1 = -3 3
u2 = -2 2
u3 = -2 2

[Z]
Z1 = 1
Z2 = i*sin(u1)
Z3 = -i*cos(u1)

[theta]
theta1 = 0
theta2 = cos(u1)
theta3 = sin(u1)

[immersion]
f1 = cos(u1)
f2 = u2
f3 = sin(u1)
f4 = u3
)cfg";

inline const char* kCylinderPregaugeConfig = R"cfg(# Cylinder with the section rotated by the gauge v0 = 0.3*u2 + 0.2*u3,
# so b and c are point-dependent. Applying the change of frame with
# v = -v0 restores the constant gauge b = c = i/2.
name = cylinder_pregauge

[domain]
u1 = -3 3
u2 = -2 2
u3 = -2 2

[Z]
Z1 = exp(-i*(0.3*u2 + 0.2*u3))
Z2 = exp(-i*(0.3*u2 + 0.2*u3))*i*sin(u1)
Z3 = -exp(-i*(0.3*u2 + 0.2*u3))*i*cos(u1)

[theta]
theta1 = 0
theta2 = cos(u1)
theta3 = sin(u1)

[immersion]
f1 = cos(u1)
f2 = u2
f3 = sin(u1)
f4 = u3
)cfg";

inline const char* kHeisenbergConfig = R"cfg(# Flat model: coordinates (x, y, t), theta = dt + 2x dy - 2y dx,
# Z_raw = d/dz + i*conj(z) d/dt with z = x + iy. All bracket
# coefficients vanish; no embedding ships with it.
name = heisenberg

[domain]
u1 = -1 1
u2 = -1 1
u3 = -1 1

[Z]
Z1 = 0.5
Z2 = -0.5*i
Z3 = u2 + i*u1

[theta]
theta1 = -2*u2
theta2 = 2*u1
theta3 = 1
)cfg";

}  // namespace detail

inline std::vector<std::string> model_names() {
  return {"sphere", "sphere_alt", "cylinder", "cylinder_pregauge", "heisenberg"};
}

inline std::string model_config_text(const std::string& name) {
  if (name == "sphere") return detail::kSphereConfig;
  if (name == "sphere_alt") return detail::kSphereAltConfig;
  if (name == "cylinder") return detail::kCylinderConfig;
  if (name == "cylinder_pregauge") return detail::kCylinderPregaugeConfig;
  if (name == "heisenberg") return detail::kHeisenbergConfig;
  throw CalcError(errc::unknown_model, "no built-in model named '" + name + "'");
}

inline ModelDescriptor model(const std::string& name) {
  ModelDescriptor d;
  d.name = name;
  d.chart = parse_chart(model_config_text(name), name);
  d.has_embedding = !d.chart.immersion.empty();
  if (name == "sphere" || name == "sphere_alt") {
    d.sasakian_expected = true;
    d.notes =
        "Radius-2 sphere {|z|^2+|w|^2 = 4}: the contact scale s = -1/2 on the ambient "
        "form Im(conj(z)dz + conj(w)dw) makes ||Zf|| = 1, and ||Tf|| = 1 then forces "
        "radius 2. Z is a rescaling of conj(w) d/dz - conj(z) d/dw; in this gauge "
        "b = c = 0 and a = (i/sqrt(2)) cot(2 u1).";
  } else if (name == "cylinder" || name == "cylinder_pregauge") {
    d.sasakian_expected = false;
    d.notes =
        "Unit tube {x1^2 + x3^2 = 1}: contact directions span{du1, sin(u1)du2 - cos(u1)du3}, "
        "theta = cos(u1)du2 + sin(u1)du3 has Reeb (0, cos u1, sin u1) and the inclusion is "
        "isometric. The default gauge gives a = 0, b = c = i/2 exactly.";
  } else if (name == "heisenberg") {
    d.sasakian_expected = true;
    d.notes = "Flat control model; a = b = c = 0 and T = (0,0,1).";
  }
  return d;
}

// Overlap transition between the two sphere charts: same manifold point.
inline std::array<double, 3> sphere_overlap_map(const std::array<double, 3>& p) {
  return {1.5707963267948966 - p[0], p[1], p[2]};
}

// Gauge expression that returns cylinder_pregauge to the b = c = i/2 frame.
inline ExprPtr cylinder_pregauge_recovery_gauge() { return parse("-(0.3*u2 + 0.2*u3)"); }

}  // namespace crcx
