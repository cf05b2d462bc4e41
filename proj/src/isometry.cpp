#include "margulis/isometry.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace margulis {

namespace {

const Mat3& Jm() { return MetricSignature::standard().J; }

}  // namespace

AffIso::AffIso(const Mat3& A_, const Vec3& b_, bool validate) : A(A_), b(b_) {
  if (!validate) return;
  if (!A.allFinite() || !b.allFinite())
    throw InputError("AffIso: nonfinite entries");
  const double ortho = (A.transpose() * Jm() * A - Jm()).norm();
  if (ortho > 1e-9)
    throw InputError("AffIso: linear part is not J-orthogonal");
  if (std::abs(A.determinant() - 1.0) > 1e-9)
    throw InputError("AffIso: determinant is not +1");
}

Vec3 apply(const AffIso& g, const Vec3& p) { return g.A * p + g.b; }

Mat3 reproject_so21(const Mat3& A, int iterations) {
  // Storage rounding alone leaves a J-defect of order eps * |A|^2, so below
  // a small multiple of that floor there is nothing left to correct.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, A.squaredNorm());
  Mat3 X = A;
  for (int i = 0; i < iterations; ++i) {
    const Mat3 D = X.transpose() * Jm() * X - Jm();
    const double d = D.norm();
    if (d <= floor) break;
    if (d <= 0.25) {
      // Multiplicative correction kills the defect to second order without
      // forming an explicit inverse, so it stays sound at any matrix norm;
      // an explicit 3x3 inverse loses the determinant to cancellation once
      // |X|^3 * eps is visible and then corrupts the matrix wholesale.
      X = X - 0.5 * X * (Jm() * D);
      continue;
    }
    if (X.norm() <= 1e3) {
      // Far from the group at moderate norm: globally convergent polar step.
      X = 0.5 * (X + Jm() * X.inverse().transpose() * Jm());
      continue;
    }
    break;  // far from the group at a norm where no double-precision step helps
  }
  return X;
}

AffIso compose(const AffIso& g, const AffIso& h) {
  AffIso r(g.A * h.A, g.A * h.b + g.b, false);
  r.chain = std::max(g.chain, h.chain) + 1;
  if (r.chain >= 8) {
    r.A = reproject_so21(r.A);
    r.chain = 0;
  }
  return r;
}

AffIso inverse(const AffIso& g) {
  const Mat3 Ai = Jm() * g.A.transpose() * Jm();
  AffIso r(Ai, -(Ai * g.b), false);
  r.chain = g.chain;
  return r;
}

AffIso power(const AffIso& g, int n) {
  AffIso base = (n < 0) ? inverse(g) : g;
  AffIso r;
  for (int i = 0; i < std::abs(n); ++i) r = compose(r, base);
  return r;
}

Vec3 eigenvector_of(const Mat3& A, double lambda) {
  const Mat3 M = A - lambda * Mat3::Identity();
  Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullV);
  return svd.matrixV().col(2);
}

IsoClass classify(const AffIso& g, double tau_class) {
  IsoClass c;
  c.trace = g.A.trace();
  const double d = std::abs(c.trace - 3.0);
  c.confidence = std::min(1.0, d / (1000.0 * tau_class));
  if (d <= tau_class) {
    if ((g.A - Mat3::Identity()).norm() <= 1e-8) {
      c.tag = IsoClassTag::Elliptic;
      c.identity = true;
      c.confidence = 1.0;
      return c;
    }
    c.tag = IsoClassTag::Parabolic;
    c.confidence = 1.0;
    Vec3 v = eigenvector_of(g.A, 1.0);
    if (std::abs(v(2)) < 1e-12)
      throw NumericalError("classify: degenerate parabolic eigenvector");
    c.xgamma = v / v(2);
    return c;
  }
  if (std::abs(c.trace) > 3.0) {
    c.tag = IsoClassTag::Hyperbolic;
    const double h = c.trace - 1.0;
    c.lambda1 = 0.5 * (h + std::sqrt(h * h - 4.0));
    Vec3 xp = eigenvector_of(g.A, c.lambda1);
    // Read the repelling direction as the dominant eigenvector of the
    // structural inverse J A^T J: shifting A by 1/lambda1 would drown the
    // shift in |A| and cost eps * |A| of subspace accuracy at large norms.
    Vec3 xm = eigenvector_of(Jm() * g.A.transpose() * Jm(), c.lambda1);
    if (std::abs(xp(2)) < 1e-12 || std::abs(xm(2)) < 1e-12)
      throw NumericalError("classify: degenerate null eigenvector");
    c.xp = xp / xp(2);
    c.xm = xm / xm(2);
    Vec3 x0 = lorentz_cross(c.xm, c.xp);
    const double q = bform(x0, x0);
    if (q <= 0.0) throw NumericalError("classify: neutral vector not spacelike");
    c.x0 = x0 / std::sqrt(q);
    return c;
  }
  c.tag = IsoClassTag::Elliptic;
  return c;
}

const char* to_string(IsoClassTag t) {
  switch (t) {
    case IsoClassTag::Hyperbolic: return "hyperbolic";
    case IsoClassTag::Parabolic: return "parabolic";
    case IsoClassTag::Elliptic: return "elliptic";
  }
  return "unknown";
}

HyperbolicData hyperbolic_eigendata(const AffIso& g) {
  const IsoClass c = classify(g);
  if (c.tag != IsoClassTag::Hyperbolic)
    throw InputError("hyperbolic_eigendata: isometry is not hyperbolic");
  HyperbolicData d;
  d.lambda1 = c.lambda1;
  d.xp = c.xp;
  d.xm = c.xm;
  d.x0 = c.x0;
  d.ell_klein = std::log(c.lambda1);
  d.ell_ratio = 2.0 * d.ell_klein;
  return d;
}

AxisData axis(const AffIso& g) {
  const HyperbolicData e = hyperbolic_eigendata(g);
  const double gap = e.lambda1 - 1.0;
  if (gap < 1e-8) {
    std::ostringstream os;
    os << "axis: ill-conditioned, lambda1 - 1 = " << gap
       << ", condition ~ " << 1.0 / gap;
    throw NumericalError(os.str());
  }
  // Decompose b in the eigenbasis via bform duality; x0 is bform-orthogonal
  // to both null eigenvectors.
  const double pm = bform(e.xp, e.xm);
  const double cp = bform(g.b, e.xm) / pm;
  const double cm = bform(g.b, e.xp) / pm;
  const double bp = -cp / (e.lambda1 - 1.0);
  const double bm = -cm / (1.0 / e.lambda1 - 1.0);
  AxisData a;
  a.point = bp * e.xp + bm * e.xm;
  a.direction = e.x0;
  a.condition = 1.0 / gap;
  return a;
}

AffIso from_sl2(const Mat2& m) {
  if (std::abs(m.determinant() - 1.0) > 1e-10)
    throw InputError("from_sl2: determinant must be 1");
  Mat2 mi;
  mi << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  Mat2 E[3];
  E[0] << 1, 0, 0, -1;
  E[1] << 0, 1, 1, 0;
  E[2] << 0, 1, -1, 0;
  Mat3 A;
  for (int i = 0; i < 3; ++i) {
    const Mat2 X = m * E[i] * mi;
    A(0, i) = X(0, 0);
    A(1, i) = 0.5 * (X(0, 1) + X(1, 0));
    A(2, i) = 0.5 * (X(0, 1) - X(1, 0));
  }
  return AffIso(A, Vec3::Zero());
}

Mat4 as_projective(const AffIso& g) {
  Mat4 P = Mat4::Zero();
  P.topLeftCorner<3, 3>() = g.A;
  P.topRightCorner<3, 1>() = g.b;
  P(3, 3) = 1.0;
  return P / P.norm();
}

DirPoint pushforward(const Mat4& P, const DirPoint& p) {
  return DirPoint(Vec4(P * p.rep()));
}

}  // namespace margulis
