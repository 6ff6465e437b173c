#include "hspace/segre.hpp"

#include "hspace/tensor.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace hspace {

std::vector<PencilRoot> eigenvalue_clusters(const Mat6<double>& m, double tol_cluster) {
  Eigen::EigenSolver<Mat6<double>> solver(m, false);
  if (solver.info() != Eigen::Success) throw ToleranceError("eigenvalue iteration did not converge");
  const auto& ev = solver.eigenvalues();

  double scale = 0.0;
  for (int i = 0; i < 6; ++i) scale = std::max(scale, std::abs(ev[i]));
  const double tol = tol_cluster * (1.0 + scale);

  std::vector<double> re(6);
  for (int i = 0; i < 6; ++i) {
    if (std::fabs(ev[i].imag()) > tol)
      throw ComplexSpectrum("complex pencil root " + std::to_string(ev[i].real()) + " + " +
                            std::to_string(ev[i].imag()) + "i");
    re[i] = ev[i].real();
  }
  std::sort(re.begin(), re.end());

  // Single linkage on the sorted real parts.
  std::vector<PencilRoot> roots;
  double sum = re[0];
  int count = 1;
  for (int i = 1; i <= 6; ++i) {
    if (i < 6 && re[i] - re[i - 1] <= tol) {
      sum += re[i];
      ++count;
      continue;
    }
    roots.push_back({sum / count, count});
    if (i < 6) {
      sum = re[i];
      count = 1;
    }
  }
  return roots;
}

std::vector<PencilRoot> pencil_eigenvalues(const Sym6& a, const Sym6& g, double tol_cluster) {
  return eigenvalue_clusters(invert(g) * a, tol_cluster);
}

JordanProfile jordan_profile(const Mat6<double>& m, double root, double tol_rank) {
  const Mat6<double> shifted = m - root * Mat6<double>::Identity();
  Eigen::JacobiSVD<Mat6<double>> base(shifted);
  const double unit = std::max(1.0, base.singularValues()[0]);

  JordanProfile profile;
  Mat6<double> power = Mat6<double>::Identity();
  double floor = kRankFloor;
  for (int k = 1; k <= 6; ++k) {
    power = (power * shifted).eval();
    floor *= unit;
    Eigen::JacobiSVD<Mat6<double>> svd(power);
    const auto& sv = svd.singularValues();
    int rank = 0;
    if (sv[0] > floor) {
      const double threshold = tol_rank * sv[0];
      for (int i = 0; i < 6; ++i)
        if (sv[i] > threshold) ++rank;
    }
    if (!profile.ranks.empty() && rank > profile.ranks.back()) {
      std::string gap = "rank sequence increased at power " + std::to_string(k) + "; singular values:";
      for (int i = 0; i < 6; ++i) gap += " " + std::to_string(sv[i]);
      throw ToleranceError(gap);
    }
    profile.ranks.push_back(rank);
  }

  // at_least[k] = number of blocks of size >= k = r_{k-1} - r_k, r_0 = 6.
  int previous = 6;
  std::vector<int> at_least(8, 0);
  for (int k = 1; k <= 6; ++k) {
    at_least[k] = previous - profile.ranks[k - 1];
    previous = profile.ranks[k - 1];
  }
  for (int k = 6; k >= 1; --k) {
    const int exactly = at_least[k] - at_least[k + 1];
    if (exactly < 0) {
      std::string seq;
      for (int r : profile.ranks) seq += " " + std::to_string(r);
      throw ToleranceError("rank sequence" + seq + " is not a Jordan rank sequence");
    }
    for (int n = 0; n < exactly; ++n) profile.sizes.push_back(k);
  }
  return profile;
}

void SegreChar::normalize() {
  for (auto& g : groups) std::sort(g.sizes.begin(), g.sizes.end(), std::greater<>());
  std::stable_sort(groups.begin(), groups.end(), [](const Group& l, const Group& r) {
    const int lm = l.sizes.empty() ? 0 : l.sizes.front();
    const int rm = r.sizes.empty() ? 0 : r.sizes.front();
    if (lm != rm) return lm > rm;
    return l.sizes.size() > r.sizes.size();
  });
}

int SegreChar::total_size() const {
  int n = 0;
  for (const auto& g : groups)
    for (int s : g.sizes) n += s;
  return n;
}

std::string render(const SegreChar& s) {
  SegreChar sorted = s;
  sorted.normalize();
  std::string out = "[";
  for (const auto& g : sorted.groups) {
    if (g.sizes.size() > 1) out += "(";
    for (int size : g.sizes) out += std::to_string(size);
    if (g.sizes.size() > 1) out += ")";
  }
  return out + "]";
}

SegreChar parse_segre(std::string_view text) {
  if (text.size() < 2 || text.front() != '[' || text.back() != ']')
    throw std::invalid_argument("Segre characteristic must be enclosed in brackets");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  SegreChar out;
  bool in_group = false;
  for (std::size_t i = 1; i + 1 < text.size(); ++i) {
    const char ch = text[i];
    if (ch == '(') {
      if (in_group) throw std::invalid_argument("nested parentheses in Segre characteristic");
      in_group = true;
      out.groups.push_back({nan, {}});
    } else if (ch == ')') {
      if (!in_group || out.groups.back().sizes.size() < 2)
        throw std::invalid_argument("malformed group in Segre characteristic");
      in_group = false;
    } else if (ch >= '1' && ch <= '9') {
      if (in_group)
        out.groups.back().sizes.push_back(ch - '0');
      else
        out.groups.push_back({nan, {ch - '0'}});
    } else {
      throw std::invalid_argument(std::string("unexpected '") + ch + "' in Segre characteristic");
    }
  }
  if (in_group) throw std::invalid_argument("unclosed group in Segre characteristic");
  if (out.total_size() != 6) throw std::invalid_argument("Segre characteristic block sizes must sum to 6");
  out.normalize();
  return out;
}

bool same_blocks(const SegreChar& a, const SegreChar& b) {
  SegreChar l = a;
  SegreChar r = b;
  l.normalize();
  r.normalize();
  if (l.groups.size() != r.groups.size()) return false;
  for (std::size_t i = 0; i < l.groups.size(); ++i)
    if (l.groups[i].sizes != r.groups[i].sizes) return false;
  return true;
}

Classification classify_pencil(const Sym6& form, const Sym6& g, const SegreTolerances& tols) {
  const Mat6<double> m = invert(g) * form;
  Classification out;
  out.roots = eigenvalue_clusters(m, tols.cluster);
  for (const PencilRoot& root : out.roots) {
    JordanProfile profile = jordan_profile(m, root.value, tols.rank);
    int total = 0;
    for (int s : profile.sizes) total += s;
    if (total != root.multiplicity)
      throw ToleranceError("block sizes for root " + std::to_string(root.value) + " sum to " + std::to_string(total) +
                           " but its multiplicity is " + std::to_string(root.multiplicity));
    out.segre.groups.push_back({root.value, profile.sizes});
    out.profiles.push_back(std::move(profile));
  }
  out.segre.normalize();
  return out;
}

Classification classify(const HSpace& space, const Point6& x, const SegreTolerances& tols) {
  require_admissible(space, x);
  return classify_pencil(space.hform<double>(x), space.metric<double>(x), tols);
}

}  // namespace hspace
