#include "margulis/flow_bundle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace margulis {

namespace {

// Hyperboloid representative of a timelike vector: unit, future.
Vec3 hyperboloid_rep(const Vec3& v) {
  const double q = -bform(v, v);
  if (!(q > 0.0)) throw InputError("hyperboloid_rep: vector is not timelike");
  Vec3 n = v / std::sqrt(q);
  if (n(2) < 0.0) n = -n;
  return n;
}

// Unit tangent at the hyperboloid point zh toward the boundary null ray q.
// Scale invariant in q.
Vec3 tangent_toward(const Vec3& q, const Vec3& zh) {
  const double pairing = -bform(q, zh);
  if (!(pairing > 1e-300)) {
    throw NumericalError("tangent_toward: degenerate boundary pairing");
  }
  return q / pairing - zh;
}

// Composite Simpson rule for a Vec3 valued integrand; n intervals, n even.
template <class F>
Vec3 simpson_vec(const F& f, double a, double b, int n) {
  const double h = (b - a) / n;
  Vec3 acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) {
    acc += ((i % 2) ? 4.0 : 2.0) * f(a + i * h);
  }
  return acc * (h / 3.0);
}

int even_at_least(int n, int lo) {
  n = std::max(n, lo);
  return n + (n % 2);
}

}  // namespace

UTBPoint::UTBPoint(const Mat3& m, bool validate) : g(m) {
  if (!validate) return;
  if (!g.allFinite()) throw InputError("UTBPoint: matrix has nonfinite entries");
  const MetricSignature& sig = MetricSignature::standard();
  // The tolerance scales with the squared matrix norm: far points of the
  // bundle are represented by large boost factors.
  const double scale = std::max(1.0, g.squaredNorm());
  if ((g.transpose() * sig.J * g - sig.J).norm() > 1e-9 * scale) {
    throw InputError("UTBPoint: matrix is not J-orthogonal");
  }
  if (g.determinant() < 0.0) {
    throw InputError("UTBPoint: matrix reverses orientation");
  }
  if (g(2, 2) <= 0.0) {
    throw InputError("UTBPoint: matrix reverses the time orientation");
  }
}

DirPoint base_point(const UTBPoint& p) {
  return DirPoint::embed_dir(p.g.col(2));
}

Vec3 base_direction(const UTBPoint& p) { return p.g.col(1); }

FiberFrame frame_at(const UTBPoint& p) {
  const double s = 1.0 / std::sqrt(2.0);
  FiberFrame f;
  f.v_plus = s * (p.g.col(1) + p.g.col(2));
  f.v_minus = s * (-p.g.col(1) + p.g.col(2));
  f.v_zero = lorentz_cross(f.v_minus, f.v_plus);
  const double q = bform(f.v_zero, f.v_zero);
  if (!(q > 0.0)) throw NumericalError("frame_at: degenerate null pair");
  f.v_zero /= std::sqrt(q);
  return f;
}

Mat3 boost_mat(double t) {
  const double c = std::cosh(t), s = std::sinh(t);
  Mat3 b;
  b << 1, 0, 0, 0, c, s, 0, s, c;
  return b;
}

UTBPoint flow(const UTBPoint& p, double t) {
  Mat3 m = p.g * boost_mat(t);
  const MetricSignature& sig = MetricSignature::standard();
  const double scale = std::max(1.0, m.squaredNorm());
  // Periodic renormalization: one polar step when drift is visible.
  if ((m.transpose() * sig.J * m - sig.J).norm() > 1e-12 * scale) {
    m = reproject_so21(m, 1);
  }
  return UTBPoint(m, false);
}

Vec3 frame_coordinates(const FiberFrame& f, const Vec3& w) {
  Mat3 M;
  M.col(0) = f.v_plus;
  M.col(1) = f.v_zero;
  M.col(2) = f.v_minus;
  Vec3 s;
  for (int i = 0; i < 3; ++i) {
    s(i) = M.col(i).norm();
    if (!(s(i) > 0.0)) throw NumericalError("frame_coordinates: zero frame vector");
    M.col(i) /= s(i);
  }
  // Column equilibration keeps each coordinate at full relative accuracy
  // even when the null vectors carry opposite exponential scales.
  Vec3 y = M.partialPivLu().solve(w);
  return Vec3(y(0) / s(0), y(1) / s(1), y(2) / s(2));
}

Vec3 halfplane_to_klein3(double x, double y) {
  if (!(std::isfinite(x) && std::isfinite(y))) {
    throw InputError("halfplane_to_klein: nonfinite coordinates");
  }
  if (y < 0.0) throw InputError("halfplane_to_klein: y must be nonnegative");
  const double s = x * x + y * y + 1.0;
  return Vec3(2.0 * x / s, 1.0 - 2.0 / s, 1.0);
}

DirPoint halfplane_to_klein(double x, double y) {
  return DirPoint::embed_dir(halfplane_to_klein3(x, y));
}

Vec2 klein_chart(const DirPoint& p) {
  const Vec3 v = p.spatial();
  if (!(v(2) > 1e-300)) {
    throw InputError("klein_chart: direction is not future");
  }
  return Vec2(v(0) / v(2), v(1) / v(2));
}

double halfplane_dist(const Vec2& z1, const Vec2& z2) {
  if (!(z1(1) > 0.0 && z2(1) > 0.0)) {
    throw InputError("halfplane_dist: points must have y > 0");
  }
  const double dx = z1(0) - z2(0), dy = z1(1) - z2(1);
  const double arg = 1.0 + (dx * dx + dy * dy) / (2.0 * z1(1) * z2(1));
  return std::acosh(std::max(1.0, arg));
}

double klein_dist(const Vec3& u, const Vec3& v) {
  const Vec3 uh = hyperboloid_rep(u), vh = hyperboloid_rep(v);
  return std::acosh(std::max(1.0, -bform(uh, vh)));
}

AxisBasis axis_point_nearest_origin(const AffIso& g) {
  const IsoClass cls = classify(g);
  if (cls.tag != IsoClassTag::Hyperbolic) {
    throw InputError("axis_point_nearest_origin: requires a hyperbolic isometry");
  }
  const Vec3 xp = cls.xp.normalized();
  const Vec3 xm = cls.xm.normalized();
  const double pairing = -2.0 * bform(xp, xm);
  if (!(pairing > 1e-14)) {
    throw NumericalError("axis_point_nearest_origin: fixed points coincide");
  }
  const double c = 1.0 / std::sqrt(pairing);
  // Along the geodesic e^s xp + e^{-s} xm the Lorentz norm is constant, so
  // the point nearest the chart origin minimizes the third coordinate.
  const double tau = 0.5 * std::log(xm(2) / xp(2));
  AxisBasis ab;
  ab.p = c * (std::exp(tau) * xp + std::exp(-tau) * xm);
  ab.u = c * (std::exp(tau) * xp - std::exp(-tau) * xm);
  ab.w0 = lorentz_cross(ab.u, ab.p);
  Mat3 F;
  F.col(0) = ab.w0;
  F.col(1) = ab.u;
  F.col(2) = ab.p;
  if (F.determinant() < 0.0) {
    ab.w0 = -ab.w0;
    F.col(0) = ab.w0;
  }
  ab.F = F;
  return ab;
}

CocycleDecomp cocycle_decompose(const AffIso& g, double axisOffset) {
  const AxisBasis ab = axis_point_nearest_origin(g);
  UTBPoint p(ab.F, false);
  if (axisOffset != 0.0) p = flow(p, axisOffset);
  CocycleDecomp d;
  d.frame = frame_at(p);
  d.b = g.b;
  const Vec3 c = frame_coordinates(d.frame, g.b);
  d.b_plus = c(0);
  d.b_zero = c(1);
  d.b_minus = c(2);
  d.norm_plus_E = std::abs(c(0)) * d.frame.v_plus.norm();
  d.norm_zero_E = std::abs(c(1)) * d.frame.v_zero.norm();
  d.norm_minus_E = std::abs(c(2)) * d.frame.v_minus.norm();
  return d;
}

CocycleDecomp cocycle_decompose(const GroupSpec& G, const Word& w,
                                double axisOffset) {
  return cocycle_decompose(evaluate(G, w), axisOffset);
}

Vec3 integrate_cocycle(const AffIso& g, int nSteps) {
  const HyperbolicData eig = hyperbolic_eigendata(g);
  const AxisBasis ab = axis_point_nearest_origin(g);
  const double tg = eig.ell_klein;
  const double a = alpha(g);
  const Vec3 q = axis(g).point;
  // Interpolation generator X = F K F^{-1} with K the boost derivative;
  // the constant field w makes the affine flow translate along the axis.
  Mat3 K = Mat3::Zero();
  K(1, 2) = 1.0;
  K(2, 1) = 1.0;
  const Mat3& J = MetricSignature::standard().J;
  const Mat3 Fi = J * ab.F.transpose() * J;  // F^{-1} for J-orthogonal F
  const Mat3 X = ab.F * K * Fi;
  const Vec3 w = (a / tg) * eig.x0 - X * q;
  auto integrand = [&](double tau) -> Vec3 {
    return ab.F * (boost_mat(tau) * (Fi * w));
  };
  const int nFine = even_at_least(nSteps, 4);
  const int nCoarse = even_at_least(nFine / 2, 2);
  const Vec3 fine = simpson_vec(integrand, 0.0, tg, nFine);
  const Vec3 coarse = simpson_vec(integrand, 0.0, tg, nCoarse);
  if ((fine - coarse).norm() > 1e-5) {
    std::ostringstream os;
    os << "integrate_cocycle: quadrature not converged, step-halving estimate "
       << (fine - coarse).norm() << " at " << nFine << " intervals";
    throw NumericalError(os.str());
  }
  return fine;
}

Vec3 integrate_cocycle(const GroupSpec& G, const Word& w, int nSteps) {
  return integrate_cocycle(evaluate(G, w), nSteps);
}

namespace {

// Unit tangent bundle point at half-plane position (x, y) on the radius R
// semicircle through 0 and 2R, oriented toward the forward endpoint 2R.
UTBPoint cusp_utb_point(double R, double x, double y) {
  const Vec3 zh = hyperboloid_rep(halfplane_to_klein3(x, y));
  const Vec3 q = halfplane_to_klein3(2.0 * R, 0.0);
  const Vec3 u = tangent_toward(q, zh);
  Mat3 F;
  F.col(0) = lorentz_cross(u, zh);
  F.col(1) = u;
  F.col(2) = zh;
  if (F.determinant() < 0.0) F.col(0) = -F.col(0);
  return UTBPoint(F);
}

}  // namespace

CuspProjections cusp_projections(double R, double k) {
  if (!(R > 1.0)) {
    throw InputError("cusp_projections: R must exceed 1, the geodesic must "
                     "cross the horodisk");
  }
  const double xIn = R - std::sqrt(R * R - 1.0);
  const FiberFrame f = frame_at(cusp_utb_point(R, xIn, 1.0));
  const Vec3 p(0.0, k, k);
  const Vec3 c = frame_coordinates(f, p);
  CuspProjections out;
  out.normp = std::abs(c(0)) * f.v_plus.norm();
  out.norm0 = std::abs(c(1)) * f.v_zero.norm();
  out.normm = std::abs(c(2)) * f.v_minus.norm();
  out.c_plus = c(0);
  out.c_zero = c(1);
  out.c_minus = c(2);
  return out;
}

CuspSegment cusp_segment_integrals(double R, double k, int nSteps) {
  if (!(R > 1.0)) {
    throw InputError("cusp_segment_integrals: R must exceed 1");
  }
  const double halfChord = std::sqrt(R * R - 1.0);
  const double xIn = R - halfChord;
  const Vec3 p(0.0, k, k);

  const FiberFrame fIn = frame_at(cusp_utb_point(R, xIn, 1.0));
  const Vec3 cIn = frame_coordinates(fIn, p);
  const Vec3 piMinusIn = cIn(2) * fIn.v_minus;
  const double nuIn = bform(fIn.v_zero, p);

  CuspSegment out;
  out.b_minus_vec = -2.0 * halfChord * piMinusIn;
  out.alpha_contrib = -2.0 * halfChord * nuIn;

  // Quadrature over the circle angle; dx = R sin(theta) dtheta.
  const double thIn = std::asin(1.0 / R);
  const double thOut = M_PI - thIn;
  auto minusIntegrand = [&](double th) -> Vec3 {
    const double x = R - R * std::cos(th);
    const double y = R * std::sin(th);
    const FiberFrame f = frame_at(cusp_utb_point(R, x, y));
    const Vec3 c = frame_coordinates(f, p);
    return (c(2) * f.v_minus) * (R * std::sin(th));
  };
  auto nuIntegrand = [&](double th) -> Vec3 {
    const double x = R - R * std::cos(th);
    const double y = R * std::sin(th);
    const FiberFrame f = frame_at(cusp_utb_point(R, x, y));
    return Vec3(bform(f.v_zero, p), 0.0, 0.0) * (R * std::sin(th));
  };
  const int n = even_at_least(nSteps, 8);
  out.b_minus_quad = -simpson_vec(minusIntegrand, thIn, thOut, n);
  out.alpha_quad = -simpson_vec(nuIntegrand, thIn, thOut, n)(0);

  // The contracting projection is constant along the geodesic. Certify it
  // with frames transported from the segment midpoint: frames built fresh
  // near the forward ideal point lose the cancellation in the tangent
  // construction, so the arc length parametrization t = log tan(theta/2)
  // keeps the comparison conditioned over the whole segment.
  const UTBPoint mid = cusp_utb_point(R, R, R);
  double residual = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double th = thIn + (thOut - thIn) * i / n;
    const FiberFrame f = frame_at(flow(mid, std::log(std::tan(0.5 * th))));
    const Vec3 c = frame_coordinates(f, p);
    residual = std::max(residual, (c(2) * f.v_minus - piMinusIn).norm());
  }
  out.frame_residual = residual;
  return out;
}

LimitTable direction_limit_experiment(const GroupSpec& G, const KleinDisk& disk,
                                      int minLen, int maxLen, bool keepRows) {
  if (minLen < 1 || maxLen < minLen) {
    throw InputError("direction_limit_experiment: bad length range");
  }
  LimitTable table;
  bool any = false;
  for (int len = minLen; len <= maxLen; ++len) {
    const std::vector<Word> words = enumerate_words(G.rank(), len);
    const std::vector<Word> kept = gamma_K_filter(G, words, disk);
    BandSummary band;
    band.length = len;
    band.count = static_cast<int>(kept.size());
    band.min_norm_E = std::numeric_limits<double>::infinity();
    for (const Word& w : kept) {
      const AffIso g = evaluate(G, w);
      const HyperbolicData eig = hyperbolic_eigendata(g);
      const CocycleDecomp dec = cocycle_decompose(g);
      LimitRow row;
      row.word = word_label(G, w);
      row.length = len;
      row.l_klein = eig.ell_klein;
      row.b_plus = dec.b_plus;
      row.b_zero = dec.b_zero;
      row.b_minus = dec.b_minus;
      row.norm_b_E = g.b.norm();
      row.dist_to_zeta = dist_to_accordant(g.b, eig.xp);
      band.max_bminus_E = std::max(band.max_bminus_E, dec.norm_minus_E);
      band.min_norm_E = std::min(band.min_norm_E, row.norm_b_E);
      band.max_dist = std::max(band.max_dist, row.dist_to_zeta);
      if (keepRows) table.rows.push_back(row);
      any = true;
    }
    table.bands.push_back(band);
  }
  if (!any) {
    throw InputError("direction_limit_experiment: no axis meets the disk; "
                     "enlarge the Klein disk radius");
  }
  return table;
}

}  // namespace margulis
