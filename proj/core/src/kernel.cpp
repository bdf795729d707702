#include "spherelag/kernel.hpp"

#include <cmath>
#include <numbers>

#include "spherelag/error.hpp"
#include "spherelag/parallel.hpp"

namespace spherelag {

HarmonicBasis::HarmonicBasis(int max_degree) : max_degree_(max_degree) {
  if (max_degree < 0) throw InvalidArgument("HarmonicBasis: degree must be >= 0");
  norm_.resize(size());
  for (int l = 0; l <= max_degree; ++l) {
    for (int k = 0; k <= l; ++k) {
      double ratio = 1.0;  // (l-k)!/(l+k)!
      for (int i = l - k + 1; i <= l + k; ++i) ratio /= i;
      double nrm = std::sqrt((2.0 * l + 1.0) / (4.0 * std::numbers::pi) * ratio);
      if (k > 0) nrm *= std::numbers::sqrt2;
      norm_[index(l, k)] = nrm;
      if (k > 0) norm_[index(l, -k)] = nrm;
    }
  }
}

std::size_t HarmonicBasis::index(int degree, int order) {
  if (degree < 0 || order > degree || order < -degree) {
    throw InvalidArgument("HarmonicBasis::index: need |order| <= degree");
  }
  const int slot = order == 0 ? 0 : (order > 0 ? 2 * order - 1 : -2 * order);
  return static_cast<std::size_t>(degree * degree + slot);
}

void HarmonicBasis::eval(const SpherePoint& p, std::span<double> out) const {
  const int L = max_degree_;
  // Pbar(l, k) = P_l^k(z) / sin^k(theta), a polynomial in z.
  double re = 1.0, im = 0.0;  // (x + i y)^k
  double pkk = 1.0;           // (2k-1)!!
  for (int k = 0; k <= L; ++k) {
    if (k > 0) {
      const double nre = re * p.x - im * p.y;
      im = re * p.y + im * p.x;
      re = nre;
      pkk *= (2.0 * k - 1.0);
    }
    double p_lm2 = 0.0;
    double p_lm1 = pkk;
    for (int l = k; l <= L; ++l) {
      double pl;
      if (l == k) {
        pl = pkk;
      } else if (l == k + 1) {
        pl = (2.0 * k + 1.0) * p.z * pkk;
      } else {
        pl = ((2.0 * l - 1.0) * p.z * p_lm1 - (l + k - 1.0) * p_lm2) / (l - k);
      }
      if (l > k) {
        p_lm2 = p_lm1;
        p_lm1 = pl;
      }
      if (k == 0) {
        out[index(l, 0)] = norm_[index(l, 0)] * pl;
      } else {
        out[index(l, k)] = norm_[index(l, k)] * pl * re;
        out[index(l, -k)] = norm_[index(l, -k)] * pl * im;
      }
    }
  }
}

Eigen::VectorXd HarmonicBasis::eval(const SpherePoint& p) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(size()));
  eval(p, std::span<double>(v.data(), size()));
  return v;
}

Eigen::MatrixXd HarmonicBasis::sample(const NodeSet& set, std::span<const std::size_t> subset) const {
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(subset.size()), static_cast<Eigen::Index>(size()));
  std::vector<double> row(size());
  for (std::size_t i = 0; i < subset.size(); ++i) {
    eval(set[subset[i]], row);
    for (std::size_t j = 0; j < size(); ++j) {
      phi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
  }
  return phi;
}

Eigen::MatrixXd HarmonicBasis::sample(const NodeSet& set) const {
  std::vector<std::size_t> all(set.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return sample(set, all);
}

namespace {

double max_abs_kernel(const KernelSpec& spec) {
  // Coarse scan then golden-section refinement of |k(t)| on [-1, 1].
  constexpr int kGrid = 4000;
  auto f = [&](double t) { return std::abs(spec(t)); };
  int best = 0;
  double best_val = f(-1.0);
  for (int i = 1; i <= kGrid; ++i) {
    const double v = f(-1.0 + 2.0 * i / kGrid);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double lo = -1.0 + 2.0 * std::max(0, best - 1) / kGrid;
  double hi = -1.0 + 2.0 * std::min(kGrid, best + 1) / kGrid;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - inv_phi * (hi - lo), b = lo + inv_phi * (hi - lo);
  double fa = f(a), fb = f(b);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    if (fa < fb) {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = f(b);
    } else {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = f(a);
    }
  }
  return std::max({best_val, fa, fb, f(lo), f(hi)});
}

}  // namespace

KernelSpec::KernelSpec(int m) : m_(m), sign_(m % 2 == 0 ? 1.0 : -1.0), sup_norm_(0.0) {
  if (m < 2) throw InvalidArgument("KernelSpec: order m must be >= 2");
  sup_norm_ = m == 2 ? 2.0 * std::numbers::ln2 : max_abs_kernel(*this);
}

double eval_kernel(const KernelSpec& spec, const SpherePoint& a, const SpherePoint& b) noexcept {
  return spec(a.dot(b));
}

Eigen::VectorXd eval_harmonics(const HarmonicBasis& basis, const SpherePoint& p) {
  return basis.eval(p);
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const NodeSet& set,
                              std::span<const std::size_t> subset) {
  const auto n = static_cast<Eigen::Index>(subset.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& pj = set[subset[static_cast<std::size_t>(j)]];
    k(j, j) = spec(pj.dot(pj));
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = spec(set[subset[static_cast<std::size_t>(i)]].dot(pj));
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const NodeSet& set) {
  const auto n = static_cast<Eigen::Index>(set.size());
  Eigen::MatrixXd k(n, n);
  parallel_for(set.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const auto& pj = set[j];
      for (std::size_t i = 0; i < set.size(); ++i) {
        k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = spec(set[i].dot(pj));
      }
    }
  });
  return k;
}

SaddleSystem assemble_saddle(const KernelSpec& spec, const NodeSet& set,
                             std::span<const std::size_t> subset) {
  const auto n = static_cast<Eigen::Index>(subset.size());
  const auto p = static_cast<Eigen::Index>(spec.poly_dim());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + p, n + p);
  m.topLeftCorner(n, n) = kernel_matrix(spec, set, subset);
  const Eigen::MatrixXd phi = spec.harmonics().sample(set, subset);
  m.topRightCorner(n, p) = phi;
  m.bottomLeftCorner(p, n) = phi.transpose();
  return SaddleSystem(subset.size(), spec.poly_dim(), std::move(m));
}

SaddleSystem assemble_saddle(const KernelSpec& spec, const NodeSet& set) {
  std::vector<std::size_t> all(set.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return assemble_saddle(spec, set, all);
}

KernelExpansion::KernelExpansion(const KernelSpec& spec, const NodeSet& centers, Eigen::VectorXd a,
                                 Eigen::VectorXd c)
    : spec_(spec), basis_(spec.harmonics()), centers_(&centers), a_(std::move(a)), c_(std::move(c)) {
  if (static_cast<std::size_t>(a_.size()) != centers.size() ||
      static_cast<std::size_t>(c_.size()) != spec.poly_dim()) {
    throw InvalidArgument("KernelExpansion: coefficient lengths do not match centers and m^2");
  }
}

double KernelExpansion::operator()(const SpherePoint& x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < centers_->size(); ++i) {
    const double ai = a_[static_cast<Eigen::Index>(i)];
    if (ai != 0.0) s += ai * spec_(x.dot((*centers_)[i]));
  }
  double buf[64];
  std::vector<double> heap;
  std::span<double> phi;
  if (basis_.size() <= 64) {
    phi = std::span<double>(buf, basis_.size());
  } else {
    heap.resize(basis_.size());
    phi = heap;
  }
  basis_.eval(x, phi);
  for (std::size_t j = 0; j < phi.size(); ++j) s += c_[static_cast<Eigen::Index>(j)] * phi[j];
  return s;
}

Eigen::VectorXd KernelExpansion::eval(std::span<const SpherePoint> xs) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(xs.size()));
  parallel_for(xs.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[static_cast<Eigen::Index>(i)] = (*this)(xs[i]);
  });
  return out;
}

Eigen::MatrixXd kernel_eval_matrix(const KernelSpec& spec, const NodeSet& set,
                                   std::span<const SpherePoint> xs) {
  Eigen::MatrixXd e(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(set.size()));
  parallel_for(xs.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < set.size(); ++j) {
        e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = spec(xs[i].dot(set[j]));
      }
    }
  });
  return e;
}

}  // namespace spherelag
