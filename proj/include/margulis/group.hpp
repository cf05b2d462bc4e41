#pragma once

#include "margulis/invariants.hpp"
#include "margulis/parabolic.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace margulis {

struct Generator {
  std::string label;
  AffIso g;
};

// Finitely generated free group of affine isometries. Letters are encoded as
// 2*i for generator i and 2*i+1 for its inverse, so lexicographic order on
// letter values reads a < A < b < B for single character labels.
struct GroupSpec {
  std::vector<Generator> generators;
  int certifiedDepth = 0;  // positivity scan depth this spec passed, 0 = none

  GroupSpec() = default;
  GroupSpec(std::vector<Generator> gens, int certified = 0);
  int rank() const { return static_cast<int>(generators.size()); }
  // Generators are fixed after construction; letter isometries are cached.
  const AffIso& letter_iso(int letter) const;

 private:
  mutable std::vector<AffIso> letters_;
};

using Word = std::vector<int>;

inline int inverse_letter(int l) { return l ^ 1; }
Word inverse_word(const Word& w);
bool is_reduced(const Word& w);
bool is_cyclically_reduced(const Word& w);

std::string word_label(const GroupSpec& G, const Word& w);
Word parse_word(const GroupSpec& G, const std::string& text);

// All freely reduced words of exactly the given length, lexicographic.
std::vector<Word> enumerate_words(int rank, int len);

// Depth-first traversal over reduced words of length in [lenMin, lenMax]
// with incrementally maintained evaluations.
void for_each_reduced_word(
    const GroupSpec& G, int lenMin, int lenMax,
    const std::function<void(const Word&, const AffIso&)>& fn);

AffIso evaluate(const GroupSpec& G, const Word& w);

// Lexicographically minimal representatives of conjugacy classes up to
// inversion, among cyclically reduced words of length in [1, maxLen].
std::vector<Word> conjugacy_class_reps(int rank, int maxLen);

std::pair<DirPoint, DirPoint> boundary_fixed_points(const AffIso& g);

struct KleinDisk {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
};

// Horoball {x : -bform(x, boundaryPoint) <= level} about a future null point.
struct Horodisk {
  Vec3 boundaryPoint;
  double level = 1.0;
};

// Hyperbolic distance from the disk center to the invariant geodesic of a
// hyperbolic isometry.
double axis_distance(const AffIso& g, const KleinDisk& disk);

// Hyperbolic words whose axis meets the closed disk. When a horodisk system
// is supplied the disk is required to avoid it.
std::vector<Word> gamma_K_filter(const GroupSpec& G,
                                 const std::vector<Word>& words,
                                 const KleinDisk& disk,
                                 const std::vector<Horodisk>* horodisks = nullptr);

struct ScanRow {
  std::string word;
  std::string cls;
  double lambda1_or_mu = 0.0;
  double alpha_or_sign = 0.0;
};

struct ScanReport {
  int maxLen = 0;
  int hyperbolicCount = 0;
  int parabolicCount = 0;
  int ellipticCount = 0;
  double minAlphaHyperbolic = 0.0;
  std::string minAlphaWord;
  std::vector<std::string> violations;
  std::vector<ScanRow> rows;
};

// Evaluates the Margulis invariant on every hyperbolic conjugacy class
// representative and the sign invariant on every parabolic one, up to the
// given word length. Any nonpositive value is reported as a violation.
ScanReport positivity_scan(const GroupSpec& G, int maxLen,
                           bool keepRows = false);

enum class ExampleKind { PuncturedTorus, ThricePunctured };

// Standard Fuchsian linear parts with a translational cocycle found by a
// seeded randomized search maximizing the minimal Margulis invariant over
// words of length at most 6, then certified by positivity_scan at depth 8.
GroupSpec example_group(ExampleKind kind, std::uint64_t cocycleSeed,
                        int trials = 200);

std::pair<AffIso, AffIso> example_linear_parts(ExampleKind kind);

// Bundled affine deformation of the punctured torus linear parts whose
// cocycle was tuned offline for the direction limit experiment and certified
// by positivity_scan at depth 8.
GroupSpec reference_deformation();

// Disk and band range the reference deformation was tuned against.
KleinDisk reference_disk();

GroupSpec group_from_json(const std::string& text);
std::string group_to_json(const GroupSpec& G);

}  // namespace margulis
