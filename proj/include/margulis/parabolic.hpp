#pragma once

#include "margulis/isometry.hpp"

#include <utility>
#include <vector>

namespace margulis {

// Basis (a, b, c) adapted to the invariant flag of a skew-adjoint nilpotent
// N, with N a = b, N b = c, bform(b,b) = 1, bform(a,c) = -1, the remaining
// pairings zero, and c future null.
struct ParabolicFrame {
  Vec3 a, b, c;
  double mu = 1.0;
  double t = 0.0;
  Mat3 changeOfBasis;  // columns c, b, a
};

ParabolicFrame canonical_frame(const Mat3& N);

// 4x4 affine matrix of the one-parameter group in frame coordinates
// (x, y, z) = (c, b, a) components.
Mat4 phi_mat4(double mu, double t);

// The same map pushed to ambient coordinates through the frame.
AffIso phi_t(const ParabolicFrame& fr, double mu, double t);

double F2(const Vec3& p, double mu);  // z^2 - 2 mu y
double F3(const Vec3& p, double mu);  // z^3 - 3 mu y z + 3 mu^2 x

Vec3 straighten(const Vec3& p, double mu);
Vec3 unstraighten(const Vec3& q, double mu, double tau = 1e-12);

// Frame-coordinate orbit samples (t, Phi(t) p).
std::vector<std::pair<double, Vec3>> orbit_curve(const Vec3& p, double mu,
                                                 double t0, double t1, int n);

// |bform(S', S') - t^2 (F2(p) - mu^2 t^2 / 12)| with S' = Phi(t) p - p,
// measured in the parabolic coordinate form.
double displacement_identity_residual(const Vec3& p, double mu, double t);

struct ParabolicNormalForm {
  ParabolicFrame frame;  // scaled so |mu| = 1
  double mu;             // +1 or -1
  double t;              // > 0
  double tSignRaw;       // +1 when g flows forward in the frame, else -1
  Vec3 shift;            // frame-coordinate translation fixing the x component
};

// Frame coordinates are q = inverse(coordinateMap) applied to an ambient
// point, where coordinateMap(q) = changeOfBasis * (q + shift). In these
// coordinates g acts exactly as phi_mat4(mu, tSignRaw * t).
ParabolicNormalForm parabolic_normal_form(const AffIso& g, double tau = 1e-12);

Vec3 normal_form_to_frame(const ParabolicNormalForm& nf, const Vec3& ambient);
Vec3 normal_form_to_ambient(const ParabolicNormalForm& nf, const Vec3& frame);

// True when the cyclic group of g acts properly: the normal form exists with
// mu bounded away from zero.
bool cyclic_properness(const AffIso& g, double tau = 1e-8);

}  // namespace margulis
