#pragma once

#include "margulis/parabolic.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace margulis {

// Ruled surface family in parabolic coordinates: leaves swept from the
// spacelike-anchored timelike lines l(r, s) = (s r, f(r), s sqrt(1-r^2)) by
// the one-parameter parabolic group of parameter mu. The height profile f is
// pinched between kappa1 and kappa2 times mu r / sqrt(1-r^2); the default is
// the midline of that band. A profile violating the band is still usable but
// carries valid = false with a witness, so the embeddedness audit can fail
// it explicitly.
struct RuledSpec {
  double mu = 1.0;
  double kappa1 = 0.25, kappa2 = 0.75;
  double s0 = 1.0;
  double r0 = 0.5;
  std::vector<Vec2> table;  // empty: midline profile; else (r, f(r)) samples

  bool valid = true;
  std::string violation;

  RuledSpec(double mu_, double kappa1_, double kappa2_, double s0_, double r0_,
            std::vector<Vec2> table_ = {});
  static RuledSpec standard(double mu_ = 1.0);

  double f(double r) const;
  double fprime(double r) const;
  std::optional<double> finv(double y) const;
  // Scale factor: f = scale * mu * r / sqrt(1-r^2) for the midline profile.
  double midline_coef() const { return 0.5 * (kappa1 + kappa2); }
};

// Ruling line point (s r, f(r), s sqrt(1-r^2)); r must lie in (0,1) and in
// the table range for tabular profiles.
Vec3 line_l(const RuledSpec& spec, double r, double s);

// sqrt(1-r^2) (mu r / sqrt(1-r^2) - f(r)) f'(r) + s^2; positive exactly when
// the line frame, its f-derivative and the flow direction stay independent.
double triple_product(const RuledSpec& spec, double r, double s);

struct SurfaceMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Vec3> attributes;  // (r, t, s) per vertex
};

// Leaf S_{f,r}: vertices Phi(t_i) l(r, s_j) over the given windows.
SurfaceMesh surface_sample(const RuledSpec& spec, double r, const Vec2& tRange,
                           const Vec2& sRange, int nt, int ns);

// Transversal leaf D_t: vertices Phi(t) l(r_i, s_j), r_i in rRange.
SurfaceMesh leaf_D(const RuledSpec& spec, double t, const Vec2& rRange,
                   const Vec2& sRange, int nr, int ns);

struct EmbedCertificate {
  bool passed = false;
  bool heightBelowChord = false;  // f(r) < mu r / sqrt(1-r^2)
  double y0 = 0.0;
  double bound = 0.0;
  double minDeltaF3 = 0.0;  // separation of cubic values over sampled levels
  std::string note;
};

// Audits the sufficient embeddedness condition at radius r: the anchor
// height sits below the chord bound, and on each sampled quadric cylinder
// level the two line crossings keep distinct cubic invariant values.
EmbedCertificate embeddedness_check(const RuledSpec& spec, double r,
                                    int grid = 50);

// Radii r of leaves through p: scans the flow window |t| <= 40 for
// alignment of the pulled-back point with a ruling line, then bisects.
std::vector<double> leaf_solve(const RuledSpec& spec, const Vec3& p);

struct Membership {
  bool inside = false;
  double r = 0.0;  // leaf radius through the point when a leaf exists
  std::string note;
};

// p lies in the parabolic region iff its leaf radius reaches r0.
Membership region_membership(const RuledSpec& spec, const Vec3& p);

// Direction-sphere samples of the line l(r, .) under s = f(r) cot(sigma);
// as r -> 1 these approach the accordant segment of the parabolic-frame
// null direction (1,0,0).
std::vector<DirPoint> line_dirpoints(const RuledSpec& spec, double r,
                                     int nSigma);

std::string format_g17(double x);

void mesh_export_obj(const SurfaceMesh& mesh, const std::string& path);
void mesh_export_csv(const SurfaceMesh& mesh, const std::string& path);
SurfaceMesh mesh_import_obj(const std::string& path);

}  // namespace margulis
