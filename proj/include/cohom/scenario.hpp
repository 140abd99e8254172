#pragma once

// Scenario files: a YAML description of a group, a measure, a
// representation and optional cocycles, turned into library objects.
//
//   name: anchor_b
//   seed: 7
//   group: {kind: free, rank: 2, labels: [a, b]}
//   # or {kind: perm, degree: 3, labels: [s, t], generators: [[1,0,2],[1,2,0]]}
//   # with (s*t)(x) = s(t(x))
//   measure: lazy_uniform        # | from_pair | {weights: [[word, weight], ...]}
//   admissible: {alpha: [[e, 1]], beta: [[a, 1], [a^-1, 1]]}   # optional
//   representation:
//     p: 2                       # number or inf
//     dim: 2
//     family: orthogonal         # | signed_permutation | unchecked
//     generators:                # row-major, one matrix per positive generator
//       - [[-1/2, -sqrt(3)/2], [sqrt(3)/2, -1/2]]
//   cocycles:                    # optional; one vector per positive generator
//     - {name: z, values: [[1, 0], [0, 1]]}
//   solver: {tol: 1e-10, max_iter: 100000, restarts: 16, kappa_restarts: 64, samples: 256, trials: 100}
//   outputs: [json, csv]

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "cohom/cocycle.hpp"
#include "cohom/errors.hpp"
#include "cohom/exact.hpp"
#include "cohom/group.hpp"
#include "cohom/measure.hpp"
#include "cohom/repspace.hpp"

namespace cohom {

struct SolverSettings {
  double tol = 1e-10;
  std::size_t max_iter = 100000;
  std::size_t restarts = 16;
  std::size_t kappa_restarts = 64;
  std::size_t samples = 256;
  std::size_t trials = 100;
};

struct NamedCocycle {
  std::string name;
  Cocycle cocycle;
};

/// A validated scenario with every cross-reference resolved.
struct Scenario {
  std::string name;
  std::string hash;  // FNV-1a of the source text
  std::optional<std::uint64_t> seed;
  GroupPtr group;
  std::string measure_kind;
  std::optional<RationalMeasure> exact_measure;
  std::optional<Measure> measure;
  std::optional<AdmissiblePair<Rational>> pair;
  RepresentationPtr rep;
  /// Exact generator matrices, when every entry parsed as an element of Q(sqrt m).
  std::optional<std::vector<exact::Matrix>> exact_generators;
  std::vector<NamedCocycle> cocycles;
  SolverSettings solver;
  std::vector<std::string> outputs{"json"};
};

inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

namespace detail {

inline YAML::Node require(const YAML::Node& parent, const std::string& key, const std::string& where) {
  const YAML::Node n = parent[key];
  if (!n) throw ValidationError(where + ": missing key '" + key + "'");
  return n;
}

template <class T>
T scalar_as(const YAML::Node& n, const std::string& what) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ValidationError("invalid value for " + what);
  }
}

inline exact::Quadratic parse_entry(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) throw ValidationError(what + " must be a scalar");
  return exact::EntryParser::parse(n.Scalar());
}

inline Rational parse_weight(const YAML::Node& n, const std::string& what) {
  const exact::Quadratic q = parse_entry(n, what);
  if (q.radicand() != 0) throw ValidationError(what + " must be rational");
  return q.rational_part();
}

inline WeightMap<Rational> parse_weights(const Group& group, const YAML::Node& list, const std::string& what) {
  if (!list.IsSequence()) throw ValidationError(what + " must be a list of [word, weight] pairs");
  WeightMap<Rational> w;
  for (const auto& item : list) {
    if (!item.IsSequence() || item.size() != 2) throw ValidationError(what + " entries must be [word, weight]");
    const Element g = group.from_word(group.parse_word(scalar_as<std::string>(item[0], what + " word")));
    w[g] += parse_weight(item[1], what + " weight");
  }
  return w;
}

inline GroupPtr parse_group(const YAML::Node& node) {
  const std::string kind = scalar_as<std::string>(require(node, "kind", "group"), "group.kind");
  std::vector<std::string> labels;
  if (node["labels"]) labels = scalar_as<std::vector<std::string>>(node["labels"], "group.labels");
  if (kind == "free") {
    const auto rank = scalar_as<long>(require(node, "rank", "group"), "group.rank");
    if (rank <= 0) throw ValidationError("group.rank must be positive");
    return Group::free(static_cast<std::size_t>(rank), labels);
  }
  if (kind == "perm") {
    const auto degree = scalar_as<long>(require(node, "degree", "group"), "group.degree");
    if (degree <= 0) throw ValidationError("group.degree must be positive");
    std::vector<Permutation> gens;
    if (node["generators"]) gens = scalar_as<std::vector<Permutation>>(node["generators"], "group.generators");
    return Group::permutations(static_cast<std::size_t>(degree), gens, labels);
  }
  throw ValidationError("group.kind must be 'free' or 'perm'");
}

inline IsometryFamily parse_family(const std::string& s) {
  if (s == "orthogonal") return IsometryFamily::Orthogonal;
  if (s == "signed_permutation") return IsometryFamily::SignedPermutation;
  if (s == "unchecked") return IsometryFamily::Unchecked;
  throw ValidationError("representation.family must be orthogonal, signed_permutation or unchecked");
}

inline double parse_p(const YAML::Node& n) {
  const std::string s = scalar_as<std::string>(n, "representation.p");
  if (s == "inf" || s == "infinity" || s == ".inf") return kInfinity;
  const double p = exact::EntryParser::parse(s).to_double();
  if (!(p >= 1.0)) throw ValidationError("representation.p must be >= 1");
  return p;
}

}  // namespace detail

/// Parses and validates scenario text. Throws ValidationError.
inline Scenario parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ValidationError(std::string("scenario is not valid YAML: ") + e.what());
  }
  if (!root.IsMap()) throw ValidationError("scenario must be a mapping");

  Scenario sc{"scenario", fnv1a_hex(text), std::nullopt, nullptr, "", std::nullopt, std::nullopt,
              std::nullopt, nullptr, std::nullopt, {}, {}, {"json"}};
  sc.name = root["name"] ? detail::scalar_as<std::string>(root["name"], "name") : "scenario";
  if (root["seed"]) sc.seed = detail::scalar_as<std::uint64_t>(root["seed"], "seed");

  sc.group = detail::parse_group(detail::require(root, "group", "scenario"));
  const Group& group = *sc.group;

  if (root["admissible"]) {
    const auto& a = root["admissible"];
    AdmissiblePair<Rational> pair;
    pair.alpha = detail::parse_weights(group, detail::require(a, "alpha", "admissible"), "admissible.alpha");
    pair.beta = detail::parse_weights(group, detail::require(a, "beta", "admissible"), "admissible.beta");
    sc.pair = std::move(pair);
  }

  const YAML::Node m = detail::require(root, "measure", "scenario");
  if (m.IsScalar() && m.Scalar() == "lazy_uniform") {
    sc.measure_kind = "lazy_uniform";
    if (!sc.pair) sc.pair = lazy_uniform_pair<Rational>(group);
    sc.exact_measure = lazy_uniform<Rational>(sc.group);
  } else if (m.IsScalar() && m.Scalar() == "from_pair") {
    if (!sc.pair) throw ValidationError("measure 'from_pair' needs an 'admissible' block");
    sc.measure_kind = "from_pair";
    sc.exact_measure = measure_from_pair(sc.group, *sc.pair);
  } else if (m.IsMap() && m["weights"]) {
    sc.measure_kind = "explicit";
    sc.exact_measure = RationalMeasure(sc.group, detail::parse_weights(group, m["weights"], "measure.weights"));
  } else {
    throw ValidationError("measure must be 'lazy_uniform', 'from_pair' or {weights: [...]}");
  }
  sc.measure = sc.exact_measure->cast<double>();

  const YAML::Node r = detail::require(root, "representation", "scenario");
  const auto dim = detail::scalar_as<long>(detail::require(r, "dim", "representation"), "representation.dim");
  if (dim <= 0) throw ValidationError("representation.dim must be positive");
  const NormedSpace space(static_cast<std::size_t>(dim), detail::parse_p(detail::require(r, "p", "representation")));
  const IsometryFamily family =
      detail::parse_family(r["family"] ? detail::scalar_as<std::string>(r["family"], "representation.family") : "unchecked");
  const YAML::Node gens = detail::require(r, "generators", "representation");
  if (!gens.IsSequence()) throw ValidationError("representation.generators must be a list of matrices");
  std::vector<MatrixXd> mats;
  std::vector<exact::Matrix> exact_mats;
  bool exact_ok = true;
  for (std::size_t gi = 0; gi < gens.size(); ++gi) {
    const auto& g = gens[gi];
    const std::string what = "representation.generators[" + std::to_string(gi) + "]";
    if (!g.IsSequence() || g.size() != static_cast<std::size_t>(dim))
      throw ValidationError(what + " must have " + std::to_string(dim) + " rows");
    MatrixXd mat(dim, dim);
    exact::Matrix em(static_cast<std::size_t>(dim), std::vector<exact::Quadratic>(static_cast<std::size_t>(dim)));
    for (long i = 0; i < dim; ++i) {
      const auto& row = g[static_cast<std::size_t>(i)];
      if (!row.IsSequence() || row.size() != static_cast<std::size_t>(dim))
        throw ValidationError(what + " row " + std::to_string(i) + " must have " + std::to_string(dim) + " entries");
      for (long j = 0; j < dim; ++j) {
        const auto q = detail::parse_entry(row[static_cast<std::size_t>(j)], what);
        em[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = q;
        mat(i, j) = q.to_double();
      }
    }
    mats.push_back(std::move(mat));
    exact_mats.push_back(std::move(em));
  }
  // A single radicand across all entries is needed for exact arithmetic.
  std::int64_t radicand = 0;
  for (const auto& em : exact_mats)
    for (const auto& row : em)
      for (const auto& q : row)
        if (q.radicand() != 0) {
          if (radicand != 0 && radicand != q.radicand()) exact_ok = false;
          radicand = q.radicand();
        }
  if (exact_ok) sc.exact_generators = std::move(exact_mats);
  sc.rep = Representation::make(sc.group, space, std::move(mats), family);

  if (root["cocycles"]) {
    for (const auto& c : root["cocycles"]) {
      const std::string name = c["name"] ? detail::scalar_as<std::string>(c["name"], "cocycle name")
                                         : "z" + std::to_string(sc.cocycles.size());
      const YAML::Node values = detail::require(c, "values", "cocycle " + name);
      if (!values.IsSequence() || values.size() != group.rank())
        throw ValidationError("cocycle " + name + " needs one vector per positive generator");
      MatrixXd table(dim, static_cast<Eigen::Index>(group.rank()));
      for (std::size_t s = 0; s < group.rank(); ++s) {
        if (!values[s].IsSequence() || values[s].size() != static_cast<std::size_t>(dim))
          throw ValidationError("cocycle " + name + " vectors must have length " + std::to_string(dim));
        for (long i = 0; i < dim; ++i)
          table(i, static_cast<Eigen::Index>(s)) =
              detail::parse_entry(values[s][static_cast<std::size_t>(i)], "cocycle " + name).to_double();
      }
      Cocycle z(sc.rep, std::move(table));
      const double residual = relation_residual(z);
      if (residual > 1e-9)
        throw ValidationError("cocycle " + name + " violates the group relations (residual " +
                              std::to_string(residual) + ")");
      sc.cocycles.push_back({name, std::move(z)});
    }
  }

  if (root["solver"]) {
    const auto& s = root["solver"];
    auto& out = sc.solver;
    if (s["tol"]) out.tol = detail::parse_entry(s["tol"], "solver.tol").to_double();
    if (s["max_iter"]) out.max_iter = detail::scalar_as<std::size_t>(s["max_iter"], "solver.max_iter");
    if (s["restarts"]) out.restarts = detail::scalar_as<std::size_t>(s["restarts"], "solver.restarts");
    if (s["kappa_restarts"])
      out.kappa_restarts = detail::scalar_as<std::size_t>(s["kappa_restarts"], "solver.kappa_restarts");
    if (s["samples"]) out.samples = detail::scalar_as<std::size_t>(s["samples"], "solver.samples");
    if (s["trials"]) out.trials = detail::scalar_as<std::size_t>(s["trials"], "solver.trials");
    if (!(out.tol > 0.0)) throw ValidationError("solver.tol must be positive");
  }
  if (root["outputs"]) sc.outputs = detail::scalar_as<std::vector<std::string>>(root["outputs"], "outputs");
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

}  // namespace cohom
