#pragma once

#include "margulis/isometry.hpp"

namespace margulis {

// Signed Lorentzian displacement along the neutral eigenvector.
double alpha(const AffIso& g);
double alpha_at(const AffIso& g, const Vec3& basePoint);

// bform(g(x) - x, v) for a fixed vector v of the linear part; independent of
// the base point x and linear in v.
double alpha_tilde(const AffIso& g, const Vec3& v, double fixTol = 1e-8);

enum class CDSign { Positive, Negative, Zero };

struct CDReport {
  CDSign sign = CDSign::Zero;
  Vec3 witness = Vec3::Zero();  // positively oriented fixed vector used
  double orientationDet = 0.0;
  double value = 0.0;  // alpha_tilde on the witness
};

CDReport cd_sign(const AffIso& g, double tau = 1e-10);
const char* to_string(CDSign s);

}  // namespace margulis
