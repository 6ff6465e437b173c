#pragma once

#include "hspace/spaces.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace hspace {

class ToleranceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ComplexSpectrum : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PencilRoot {
  double value = 0.0;
  int multiplicity = 0;
};

/// Real eigenvalues of m, merged when |r1 - r2| <= tol_cluster (1 + max|r|).
/// A cluster's value is the mean of its members.
std::vector<PencilRoot> eigenvalue_clusters(const Mat6<double>& m, double tol_cluster);

/// Roots of det(a - r g) = 0 via the eigenvalues of g^-1 a.
std::vector<PencilRoot> pencil_eigenvalues(const Sym6& a, const Sym6& g, double tol_cluster);

struct JordanProfile {
  std::vector<int> ranks;  // numrank((m - root)^k), k = 1..6
  std::vector<int> sizes;  // block sizes, descending
};

/// A power (m - root I)^k whose largest singular value is below
/// kRankFloor * max(1, sigma_max(m - root I))^k is rounding noise.
inline constexpr double kRankFloor = 1e-12;

/// Block sizes for one eigenvalue from the rank sequence of powers of
/// (m - root I). A singular value of the k-th power counts as zero when it
/// is at most tol_rank times that power's largest singular value, or when
/// the whole power is below the rounding floor.
JordanProfile jordan_profile(const Mat6<double>& m, double root, double tol_rank);

/// Jordan block sizes of a pencil grouped by shared eigenvalue.
struct SegreChar {
  struct Group {
    double eigenvalue = 0.0;
    std::vector<int> sizes;  // descending
  };
  std::vector<Group> groups;  // canonical order, see normalize()

  /// Sorts sizes within each group and groups by (largest block, block
  /// count) descending.
  void normalize();
  int total_size() const;
};

/// "[3(21)]"-style string; parenthesizes groups of two or more blocks.
std::string render(const SegreChar& s);

/// Inverse of render(); eigenvalues are left as NaN. Block sizes must sum to 6.
SegreChar parse_segre(std::string_view text);

/// Same block sizes and grouping, ignoring eigenvalues.
bool same_blocks(const SegreChar& a, const SegreChar& b);

struct SegreTolerances {
  double cluster = 1e-6;
  double rank = 1e-8;
};

struct Classification {
  SegreChar segre;
  std::vector<PencilRoot> roots;
  std::vector<JordanProfile> profiles;  // parallel to roots
};

/// Classifies the pencil (form, g) through m = g^-1 form.
Classification classify_pencil(const Sym6& form, const Sym6& g, const SegreTolerances& tols);

/// classify_pencil(hform, metric) at an admissible point.
Classification classify(const HSpace& space, const Point6& x, const SegreTolerances& tols = {});

}  // namespace hspace
