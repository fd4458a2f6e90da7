#include "lpqr/sim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "lpqr/error.hpp"

namespace lpqr {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (cached_) {
    const double z = *cached_;
    cached_.reset();
    return z;
  }
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(angle);
  return r * std::cos(angle);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string_view design_name(Design d) {
  switch (d) {
    case Design::D1: return "D1";
    case Design::D2: return "D2";
    case Design::D3: return "D3";
    case Design::D4: return "D4";
  }
  return "D?";
}

Design parse_design(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (s == "D1" || s == "1") return Design::D1;
  if (s == "D2" || s == "2") return Design::D2;
  if (s == "D3" || s == "3") return Design::D3;
  if (s == "D4" || s == "4") return Design::D4;
  throw Error(ErrorKind::InvalidArgument, "unknown design '" + std::string(text) + "'");
}

Vector sample_scaled_t3(Eigen::Index count, Rng& rng) {
  Vector out(count);
  const double sqrt3 = std::sqrt(3.0);
  for (Eigen::Index k = 0; k < count; ++k) {
    const double z = rng.normal();
    double chi2 = 0.0;
    for (int d = 0; d < 3; ++d) {
      const double g = rng.normal();
      chi2 += g * g;
    }
    out[k] = z / std::sqrt(chi2 / 3.0) / sqrt3;
  }
  return out;
}

namespace {

Vector unit_gaussian(Eigen::Index dim, Rng& rng) {
  Vector v(dim);
  for (Eigen::Index k = 0; k < dim; ++k) v[k] = rng.normal();
  return v / v.norm();
}

}  // namespace

SimInstance generate(const DesignSpec& spec) {
  if (spec.n < 1 || spec.t_len < 1 || spec.p < 1) {
    throw Error(ErrorKind::InvalidArgument, "design needs n, T, p >= 1");
  }
  const Eigen::Index n = spec.n, t_len = spec.t_len, p = spec.p;
  const bool location_scale = spec.design == Design::D2 || spec.design == Design::D4;
  const bool random_factors = spec.design == Design::D3 || spec.design == Design::D4;
  Rng rng(spec.seed);

  Matrix design(n * t_len, p);
  for (Eigen::Index t = 0; t < t_len; ++t) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) design(i + n * t, j) = rng.normal();
    }
  }

  SimInstance inst;
  inst.theta_true = Vector::Zero(p);
  inst.theta_true.head(std::min<Eigen::Index>(10, p)).setOnes();

  inst.pi_true = Matrix::Zero(n, t_len);
  if (random_factors) {
    for (int k = 0; k < 5; ++k) {
      const double c = 0.25 * rng.uniform();
      const Vector u = unit_gaussian(n, rng);
      const Vector v = unit_gaussian(t_len, rng);
      inst.pi_true.noalias() += c * u * v.transpose();
    }
  } else {
    const double dn = static_cast<double>(n), dt = static_cast<double>(t_len);
    for (Eigen::Index t = 0; t < t_len; ++t) {
      const double g = std::cos(4.0 * std::numbers::pi * static_cast<double>(t + 1) / dt);
      for (Eigen::Index i = 0; i < n; ++i) {
        inst.pi_true(i, t) = 5.0 * static_cast<double>(i + 1) * g / dn;
      }
    }
  }

  const Vector xb_flat = design * inst.theta_true;
  const Matrix xb = xb_flat.reshaped(n, t_len);
  inst.true_median_surface = xb + inst.pi_true;

  Matrix noise(n, t_len);
  if (location_scale) {
    Vector scale_coef(p);
    if (spec.scale_coef_override) {
      if (spec.scale_coef_override->size() != p) {
        throw Error(ErrorKind::LengthMismatch, "scale_coef_override length differs from p");
      }
      scale_coef = *spec.scale_coef_override;
    } else {
      for (Eigen::Index j = 0; j < p; ++j) {
        scale_coef[j] = static_cast<double>(j + 1) / (2.0 * static_cast<double>(p));
      }
    }
    const Vector scale_flat = design * scale_coef;
    for (Eigen::Index k = 0; k < noise.size(); ++k) {
      noise.data()[k] = scale_flat[k] * rng.normal();
    }
    inst.scale_coef = std::move(scale_coef);
  } else {
    const Vector eps = sample_scaled_t3(n * t_len, rng);
    noise = eps.reshaped(n, t_len);
  }

  inst.data = PanelData(inst.true_median_surface + noise, std::move(design));
  return inst;
}

}  // namespace lpqr
