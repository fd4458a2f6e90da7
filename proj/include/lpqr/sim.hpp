#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "lpqr/panel.hpp"

namespace lpqr {

/// Reproducible generator: std::mt19937_64 (fully specified by the C++
/// standard) with hand-written uniform and Box-Muller normal transforms, so the
/// stream does not depend on the standard library's distribution classes.
///
///   uniform():  (next >> 11) * 2^-53, in [0, 1)
///   normal():   Box-Muller on u1 = 1 - uniform(), u2 = uniform();
///               returns r*cos(2 pi u2) and caches r*sin(2 pi u2) for the next call
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64+boxmuller-v1";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  double normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> cached_;
};

/// splitmix64(base + 0x9E3779B97F4A7C15 * (index + 1)); seeds Monte Carlo reps.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

enum class Design { D1, D2, D3, D4 };

std::string_view design_name(Design d);
/// Accepts "D1".."D4" (case-insensitive) or "1".."4".
Design parse_design(std::string_view text);

struct DesignSpec {
  Design design = Design::D1;
  Eigen::Index n = 100;
  Eigen::Index t_len = 100;
  Eigen::Index p = 5;
  std::uint64_t seed = 0;
  std::optional<Vector> scale_coef_override;
};

struct SimInstance {
  PanelData data;
  Vector theta_true;
  Matrix pi_true;
  std::optional<Vector> scale_coef;
  Matrix true_median_surface;
};

/// Draws t(3) / sqrt(3) as Z / sqrt(chi2_3 / 3) / sqrt(3), chi2_3 a sum of three squared normals.
Vector sample_scaled_t3(Eigen::Index count, Rng& rng);

/// Draw order: X (t outer, i, then j inner), Pi (D3/D4: per factor c_k, u_k, v_k),
/// then errors in column-major (i fastest) order.
SimInstance generate(const DesignSpec& spec);

}  // namespace lpqr
