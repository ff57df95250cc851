#include "ekman/surface_layer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ekman/quadrature.hpp"

namespace ekman {

void MOParameters::validate() const {
  if (!(kappa > 0.3 && kappa < 0.5)) throw ConfigError("kappa must lie in (0.3, 0.5)");
  if (!(roughness > 0.0)) throw ConfigError("roughness length must be positive");
  if (!(molecular_viscosity > 0.0)) throw ConfigError("molecular viscosity must be positive");
  if (!(gravity > 0.0) || !(theta_ref > 0.0)) throw ConfigError("gravity and theta_ref must be positive");
  if (!(u_star_floor > 0.0)) throw ConfigError("u_star floor must be positive");
  if (bulk_max_iterations < 1) throw ConfigError("bulk needs at least one iteration");
}

namespace stability {

// Businger-Dyer, Paulson integrated forms for zeta < 0.
double phi_m(double zeta) {
  return zeta >= 0.0 ? 1.0 + 5.0 * zeta : std::pow(1.0 - 16.0 * zeta, -0.25);
}

double psi_m(double zeta) {
  if (zeta >= 0.0) return -5.0 * zeta;
  const double x = std::pow(1.0 - 16.0 * zeta, 0.25);
  return 2.0 * std::log(0.5 * (1.0 + x)) + std::log(0.5 * (1.0 + x * x)) - 2.0 * std::atan(x) +
         0.5 * std::numbers::pi;
}

double phi_h(double zeta) {
  return zeta >= 0.0 ? 1.0 + 5.0 * zeta : std::pow(1.0 - 16.0 * zeta, -0.5);
}

double psi_h(double zeta) {
  if (zeta >= 0.0) return -5.0 * zeta;
  const double y = std::sqrt(1.0 - 16.0 * zeta);
  return 2.0 * std::log(0.5 * (1.0 + y));
}

}  // namespace stability

namespace {

const GaussRule& rule() {
  static const GaussRule r = gauss_legendre(24);
  return r;
}

// Floor keeping the shapes positive in the free-convection limit.
constexpr double kMinShape = 1e-3;

// Integral over [a, b] of the log part ln(1 + z/z_r).
double log_integral(double a, double b, double zr) {
  auto antiderivative = [zr](double z) { return (z + zr) * std::log1p(z / zr) - z; };
  return antiderivative(b) - antiderivative(a);
}

template <typename Psi>
double shape_average(double a, double b, double inv_l, double zr, Psi psi) {
  if (b - a <= 0.0) {
    return std::log1p(a / zr) - psi((a + zr) * inv_l) + psi(zr * inv_l);
  }
  double correction = 0.0;
  if (inv_l != 0.0) {
    correction = integrate(rule(), [&](double z) { return psi((z + zr) * inv_l); }, a, b);
  }
  return (log_integral(a, b, zr) - correction) / (b - a) + psi(zr * inv_l);
}

void check_in_layer(double z, const SurfaceState& s) {
  if (z < 0.0 || z > s.delta_a * (1.0 + 1e-12)) {
    throw DomainError("height outside of the surface layer");
  }
}

}  // namespace

double momentum_shape(double z, double inv_l, const MOParameters& p) {
  const double zr = p.roughness;
  return std::max(kMinShape * std::log1p(z / zr),
                  std::log1p(z / zr) - stability::psi_m((z + zr) * inv_l) +
                      stability::psi_m(zr * inv_l));
}

double heat_shape(double z, double inv_l, const MOParameters& p) {
  const double zr = p.roughness;
  return std::max(kMinShape * std::log1p(z / zr),
                  std::log1p(z / zr) - stability::psi_h((z + zr) * inv_l) +
                      stability::psi_h(zr * inv_l));
}

SurfaceState bulk(const Complex& u_at_eval, double delta_theta, double z_eval,
                  const MOParameters& p, const SurfaceState& prev) {
  if (!(z_eval > 0.0)) {
    throw DomainError("bulk evaluation height must be positive");
  }
  if (!std::isfinite(std::abs(u_at_eval)) || !std::isfinite(delta_theta)) {
    throw NumericsError("non-finite input to the bulk routine");
  }
  SurfaceState out = prev;
  const double speed = std::abs(u_at_eval);
  if (speed < p.u_star_floor) {
    out.u_star = p.u_star_floor;
    out.theta_star = 0.0;
    out.obukhov_length = std::numeric_limits<double>::infinity();
    out.bulk_converged = true;
    out.bulk_iterations = 0;
    return out;
  }
  out.e_tau = u_at_eval / speed;

  double inv_l = 0.0;
  double u_star = 0.0;
  double theta_star = 0.0;
  double last_step = 0.0;
  bool converged = false;
  int it = 0;
  for (it = 1; it <= p.bulk_max_iterations; ++it) {
    const double prev_u_star = u_star;
    u_star = std::max(p.u_star_floor, p.kappa * speed / momentum_shape(z_eval, inv_l, p));
    theta_star = p.kappa * delta_theta / heat_shape(z_eval, inv_l, p);
    if (it > 1 && std::abs(u_star - prev_u_star) < p.bulk_tolerance * u_star) {
      converged = true;
      break;
    }
    const double target = p.kappa * p.gravity * theta_star / (u_star * u_star * p.theta_ref);
    double step = target - inv_l;
    if (last_step * step < 0.0) {
      step *= 0.5;  // oscillating: damp
    }
    last_step = step;
    inv_l += step;
  }
  if (!converged) {
    u_star = std::max(p.u_star_floor, p.kappa * speed / momentum_shape(z_eval, inv_l, p));
    theta_star = p.kappa * delta_theta / heat_shape(z_eval, inv_l, p);
  }
  out.u_star = u_star;
  out.theta_star = theta_star;
  out.obukhov_length = inv_l == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / inv_l;
  out.bulk_converged = converged;
  out.bulk_iterations = std::min(it, p.bulk_max_iterations);
  return out;
}

Complex mo_profile_u(double z, const SurfaceState& s, const MOParameters& p) {
  check_in_layer(z, s);
  if (z == 0.0) return Complex(0.0);
  return (s.u_star / p.kappa) * momentum_shape(z, s.inverse_obukhov(), p) * s.e_tau;
}

double mo_profile_theta(double z, const SurfaceState& s, const MOParameters& p) {
  check_in_layer(z, s);
  if (z == 0.0) return 0.0;
  return (s.theta_star / p.kappa) * heat_shape(z, s.inverse_obukhov(), p);
}

Complex mo_average_u(double z_lo, double z_hi, const SurfaceState& s, const MOParameters& p) {
  check_in_layer(z_lo, s);
  check_in_layer(z_hi, s);
  const double avg = shape_average(z_lo, z_hi, s.inverse_obukhov(), p.roughness, stability::psi_m);
  return (s.u_star / p.kappa) * avg * s.e_tau;
}

double mo_average_theta(double z_lo, double z_hi, const SurfaceState& s, const MOParameters& p) {
  check_in_layer(z_lo, s);
  check_in_layer(z_hi, s);
  const double avg = shape_average(z_lo, z_hi, s.inverse_obukhov(), p.roughness, stability::psi_h);
  return (s.theta_star / p.kappa) * avg;
}

double mo_viscosity(double z, const SurfaceState& s, const MOParameters& p) {
  check_in_layer(z, s);
  const double zz = z + p.roughness;
  return p.kappa * s.u_star * zz / stability::phi_m(zz * s.inverse_obukhov());
}

double mo_heat_diffusivity(double z, const SurfaceState& s, const MOParameters& p) {
  check_in_layer(z, s);
  const double zz = z + p.roughness;
  return p.kappa * s.u_star * zz / stability::phi_h(zz * s.inverse_obukhov());
}

std::string_view to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::FD: return "fd";
    case SchemeKind::FV1: return "fv1";
    case SchemeKind::FV2: return "fv2";
    case SchemeKind::FVfree: return "fvfree";
  }
  return "?";
}

SchemeKind parse_scheme(std::string_view name) {
  if (name == "fd" || name == "FD") return SchemeKind::FD;
  if (name == "fv1" || name == "FV1") return SchemeKind::FV1;
  if (name == "fv2" || name == "FV2") return SchemeKind::FV2;
  if (name == "fvfree" || name == "FVfree" || name == "fv_free") return SchemeKind::FVfree;
  throw ConfigError("unknown surface scheme '" + std::string(name) + "'");
}

SurfaceCoupling boundary_row(SchemeKind scheme, const SurfaceState& state, double first_size,
                             double u_eval_magnitude, double k_bottom, double eval_height,
                             const MOParameters& p) {
  SurfaceCoupling c;
  c.scheme = scheme;
  c.k_bottom = k_bottom;
  c.eval_height = eval_height;
  c.drag = state.u_star * state.u_star / std::max(u_eval_magnitude, p.u_star_floor);
  switch (scheme) {
    case SchemeKind::FV1:
    case SchemeKind::FD:
      c.row = BoundaryRow<Complex>{Complex(k_bottom), Complex(0.0), Complex(-c.drag), Complex(0.0)};
      break;
    case SchemeKind::FV2:
    case SchemeKind::FVfree:
      // u(delta_a) = u_sub - h phi_d / 3 - h phi_1 / 6
      c.row = BoundaryRow<Complex>{Complex(k_bottom + c.drag * first_size / 3.0),
                                   Complex(c.drag * first_size / 6.0), Complex(-c.drag),
                                   Complex(0.0)};
      break;
  }
  return c;
}

double heat_transfer_coefficient(const SurfaceState& state, double z_eval, const MOParameters& p) {
  return p.kappa * state.u_star / heat_shape(z_eval, state.inverse_obukhov(), p);
}

BoundaryRow<double> heat_boundary_row(SchemeKind scheme, const SurfaceState& state,
                                      double first_size, double k_bottom, double eval_height,
                                      double theta_surface, const MOParameters& p) {
  const double ch = heat_transfer_coefficient(state, eval_height, p);
  if (scheme == SchemeKind::FV2 || scheme == SchemeKind::FVfree) {
    return BoundaryRow<double>{k_bottom + ch * first_size / 3.0, ch * first_size / 6.0, -ch,
                               -ch * theta_surface};
  }
  return BoundaryRow<double>{k_bottom, 0.0, -ch, -ch * theta_surface};
}

Complex wall_viscosity_term(const SurfaceState& state, double first_size, double k0) {
  if (!(k0 > 0.0)) {
    throw DomainError("wall viscosity must be positive");
  }
  return state.u_star * state.u_star * state.e_tau * first_size / (6.0 * k0);
}

}  // namespace ekman
