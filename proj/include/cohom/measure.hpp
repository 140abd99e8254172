#pragma once

// Finitely supported probability measures on a Group, their convolution
// algebra, and the discrete admissibility conditions.

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cohom/errors.hpp"
#include "cohom/group.hpp"

namespace cohom {

using Rational = boost::multiprecision::cpp_rational;

template <class W>
inline constexpr bool is_exact_weight_v = std::is_same_v<W, Rational>;

template <class W>
double to_double(const W& w) {
  if constexpr (is_exact_weight_v<W>)
    return w.template convert_to<double>();
  else
    return static_cast<double>(w);
}

/// Nonnegative weight function of finite support. Zero entries are dropped.
template <class W>
using WeightMap = std::map<Element, W>;

template <class W>
class BasicMeasure {
 public:
  static constexpr double kMassTolerance = 1e-12;

  BasicMeasure(GroupPtr group, WeightMap<W> weights) : group_(std::move(group)) {
    W total{0};
    for (auto& [g, w] : weights) {
      if (g.group_ptr() != group_.get()) throw UsageError("measure support element from a different group");
      if (w < W{0}) throw ValidationError("negative weight at " + group_->format(g));
      total += w;
      if (w != W{0}) weights_.emplace(g, w);
    }
    if constexpr (is_exact_weight_v<W>) {
      if (total != W{1}) throw ValidationError("measure weights do not sum to 1");
    } else {
      if (std::abs(to_double(total) - 1.0) > kMassTolerance)
        throw ValidationError("measure weights sum to " + std::to_string(to_double(total)) + ", not 1");
    }
  }

  static BasicMeasure dirac(GroupPtr group, const Element& g) {
    WeightMap<W> w;
    w.emplace(g, W{1});
    return BasicMeasure(std::move(group), std::move(w));
  }

  const GroupPtr& group() const { return group_; }
  const WeightMap<W>& weights() const { return weights_; }
  std::size_t support_size() const { return weights_.size(); }

  W operator()(const Element& g) const {
    auto it = weights_.find(g);
    return it == weights_.end() ? W{0} : it->second;
  }

  W total_mass() const {
    W t{0};
    for (const auto& [g, w] : weights_) t += w;
    return t;
  }

  /// mu(g) == mu(g^{-1}) for all g (within tol for float weights).
  bool is_symmetric(double tol = 1e-12) const {
    for (const auto& [g, w] : weights_) {
      const W wi = (*this)(group_->inverse(g));
      if constexpr (is_exact_weight_v<W>) {
        if (wi != w) return false;
      } else {
        if (std::abs(to_double(wi) - to_double(w)) > tol) return false;
      }
    }
    return true;
  }

  template <class V>
  BasicMeasure<V> cast() const {
    WeightMap<V> w;
    for (const auto& [g, x] : weights_) {
      if constexpr (std::is_same_v<V, double>)
        w.emplace(g, to_double(x));
      else
        w.emplace(g, V(x));
    }
    return BasicMeasure<V>(group_, std::move(w));
  }

 private:
  GroupPtr group_;
  WeightMap<W> weights_;
};

using Measure = BasicMeasure<double>;
using RationalMeasure = BasicMeasure<Rational>;

/// (mu * nu)(g) = sum_h mu(h) nu(h^{-1} g).
template <class W>
BasicMeasure<W> convolve(const BasicMeasure<W>& mu, const BasicMeasure<W>& nu) {
  if (mu.group() != nu.group()) throw UsageError("convolution of measures on different groups");
  const Group& g = *mu.group();
  WeightMap<W> out;
  for (const auto& [h, wh] : mu.weights())
    for (const auto& [k, wk] : nu.weights()) out[g.multiply(h, k)] += wh * wk;
  return BasicMeasure<W>(mu.group(), std::move(out));
}

/// Left-fold convolution power; power(mu, 0) is the Dirac mass at e.
template <class W>
BasicMeasure<W> power(const BasicMeasure<W>& mu, std::size_t n) {
  if (n == 0) return BasicMeasure<W>::dirac(mu.group(), mu.group()->identity());
  BasicMeasure<W> acc = mu;
  for (std::size_t i = 1; i < n; ++i) acc = convolve(acc, mu);
  return acc;
}

/// The pair (alpha, beta) of nonnegative functions from which an admissible
/// density (alpha + beta) / total is formed.
template <class W>
struct AdmissiblePair {
  WeightMap<W> alpha;
  WeightMap<W> beta;
};

struct AdmissibilityViolation {
  int condition = 0;  // 1, 2 or 3
  std::optional<Letter> generator;
  std::optional<Element> at;
  std::string message;
};

struct AdmissibilityResult {
  bool admissible = true;
  std::vector<AdmissibilityViolation> violations;
};

/// Checks alpha(e) > 0, sum(alpha) = 1, and (s.beta)(g) = beta(s^{-1} g) >= alpha(g)
/// for every s in S and every g in supp(alpha).
template <class W>
AdmissibilityResult check_admissible(const AdmissiblePair<W>& pair, const Group& group) {
  auto weight = [](const WeightMap<W>& m, const Element& g) {
    auto it = m.find(g);
    return it == m.end() ? W{0} : it->second;
  };
  AdmissibilityResult r;
  auto fail = [&](AdmissibilityViolation v) {
    r.admissible = false;
    r.violations.push_back(std::move(v));
  };
  for (const auto* m : {&pair.alpha, &pair.beta})
    for (const auto& [g, w] : *m)
      if (w < W{0}) fail({0, std::nullopt, g, "negative weight"});

  const Element e = group.identity();
  if (!(weight(pair.alpha, e) > W{0})) fail({1, std::nullopt, e, "alpha(e) must be positive"});

  W total{0};
  for (const auto& [g, w] : pair.alpha) total += w;
  bool mass_ok;
  if constexpr (is_exact_weight_v<W>)
    mass_ok = total == W{1};
  else
    mass_ok = std::abs(to_double(total) - 1.0) <= BasicMeasure<W>::kMassTolerance;
  if (!mass_ok) fail({2, std::nullopt, std::nullopt, "alpha must have total mass 1"});

  for (Letter s : group.letters()) {
    const Element s_inv = group.generator(-s);
    for (const auto& [g, a] : pair.alpha) {
      if (a == W{0}) continue;
      if (weight(pair.beta, group.multiply(s_inv, g)) < a)
        fail({3, s, g,
              "(" + group.letter_name(s) + " . beta)(" + group.format(g) + ") < alpha(" + group.format(g) + ")"});
    }
  }
  return r;
}

/// Normalized density (alpha + beta) / sum(alpha + beta).
template <class W>
BasicMeasure<W> measure_from_pair(GroupPtr group, const AdmissiblePair<W>& pair) {
  WeightMap<W> sum;
  for (const auto* m : {&pair.alpha, &pair.beta})
    for (const auto& [g, w] : *m) sum[g] += w;
  W total{0};
  for (const auto& [g, w] : sum) total += w;
  if (!(total > W{0})) throw ValidationError("alpha + beta has zero mass");
  for (auto& [g, w] : sum) w /= total;
  return BasicMeasure<W>(std::move(group), std::move(sum));
}

/// alpha = delta_e, beta = indicator of the set S.
template <class W = double>
AdmissiblePair<W> lazy_uniform_pair(const Group& group) {
  AdmissiblePair<W> p;
  p.alpha.emplace(group.identity(), W{1});
  for (Letter s : group.letters()) p.beta[group.generator(s)] = W{1};
  return p;
}

/// Weight 1/(1+|S|) on e and on each element of S (as a set; coinciding
/// entries merge).
template <class W = double>
BasicMeasure<W> lazy_uniform(const GroupPtr& group) {
  return measure_from_pair(group, lazy_uniform_pair<W>(*group));
}

}  // namespace cohom
