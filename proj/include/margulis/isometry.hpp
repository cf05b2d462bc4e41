#pragma once

#include "margulis/core.hpp"

namespace margulis {

// Affine isometry x -> A x + b with A in SO(2,1), standard signature.
struct AffIso {
  Mat3 A;
  Vec3 b;
  int chain = 0;  // compositions since the last reprojection onto SO(2,1)

  AffIso() : A(Mat3::Identity()), b(Vec3::Zero()) {}
  AffIso(const Mat3& A_, const Vec3& b_, bool validate = true);

  static AffIso identity() { return AffIso(); }
};

Vec3 apply(const AffIso& g, const Vec3& p);
AffIso compose(const AffIso& g, const AffIso& h);
AffIso inverse(const AffIso& g);
AffIso power(const AffIso& g, int n);

// Drives A toward SO(2,1) by multiplicative correction of the J-defect
// A^T J A - J; contracts quadratically and stays sound at any matrix norm.
// Inputs far from the group fall back to an inverse-based polar step, which
// is only attempted at moderate norms. No-op once the defect reaches the
// storage floor eps * |A|^2.
Mat3 reproject_so21(const Mat3& A, int iterations = 2);

enum class IsoClassTag { Hyperbolic, Parabolic, Elliptic };

struct IsoClass {
  IsoClassTag tag = IsoClassTag::Elliptic;
  bool identity = false;
  double trace = 3.0;
  // Trace distance from the classification boundary, clamped to [0, 1];
  // small values flag a near-parabolic decision.
  double confidence = 1.0;
  // Hyperbolic payload.
  double lambda1 = 0.0;
  Vec3 xp = Vec3::Zero(), xm = Vec3::Zero(), x0 = Vec3::Zero();
  // Parabolic payload: the fixed future null direction, third coordinate 1.
  Vec3 xgamma = Vec3::Zero();
};

IsoClass classify(const AffIso& g, double tau_class = 1e-8);
const char* to_string(IsoClassTag t);

struct HyperbolicData {
  double lambda1;
  Vec3 xp, xm, x0;
  double ell_ratio;  // log(lambda1/lambda3) = 2 log(lambda1), the full
                     // eigenvalue-ratio convention
  double ell_klein;  // log(lambda1), the curvature -1 displacement
};

HyperbolicData hyperbolic_eigendata(const AffIso& g);

struct AxisData {
  Vec3 point;      // q with g(q) - q parallel to x0
  Vec3 direction;  // x0
  double condition;
};

AxisData axis(const AffIso& g);

// Adjoint action of SL(2,R) on traceless 2x2 matrices in a basis whose
// induced form is diag(1,1,-1). Kernel {I, -I}.
AffIso from_sl2(const Mat2& m);

// [[A, b],[0,1]] normalized to unit Frobenius norm.
Mat4 as_projective(const AffIso& g);
DirPoint pushforward(const Mat4& P, const DirPoint& p);

// Euclidean-unit kernel vector of A - lambda I via SVD.
Vec3 eigenvector_of(const Mat3& A, double lambda);

}  // namespace margulis
