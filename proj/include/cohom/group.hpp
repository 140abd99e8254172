#pragma once

// Finitely generated groups with exact normal forms: free groups (reduced
// words) and finite permutation groups (arrays, enumerated by Cayley BFS).

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdlib>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "cohom/errors.hpp"

namespace cohom {

/// A letter of the symmetric generating set S: +(i+1) stands for the i-th
/// positive generator, -(i+1) for its inverse.
using Letter = int;
using Word = std::vector<Letter>;
using Permutation = std::vector<int>;

inline std::size_t generator_index(Letter l) { return static_cast<std::size_t>(std::abs(l)) - 1; }
inline Letter positive_letter(std::size_t i) { return static_cast<Letter>(i) + 1; }

enum class GroupKind { Free, FinitePerm };

class Group;
using GroupPtr = std::shared_ptr<const Group>;

/// An element in normal form. Holds a non-owning pointer to its group; an
/// element must not outlive the Group it came from.
class Element {
 public:
  Element() = default;

  const Group& group() const { return *group_; }
  const Group* group_ptr() const { return group_; }
  /// Reduced word (free) or permutation array (finite).
  const std::vector<int>& data() const { return data_; }
  /// Position in the BFS enumeration; finite groups only.
  std::size_t index() const { return index_; }

  bool operator==(const Element& o) const { return group_ == o.group_ && data_ == o.data_; }

  /// Shortlex order on the normal form.
  std::strong_ordering operator<=>(const Element& o) const {
    if (auto c = data_.size() <=> o.data_.size(); c != 0) return c;
    return data_ <=> o.data_;
  }

 private:
  friend class Group;
  Element(const Group* g, std::vector<int> data, std::size_t index)
      : group_(g), data_(std::move(data)), index_(index) {}

  const Group* group_ = nullptr;
  std::vector<int> data_;
  std::size_t index_ = 0;
};

class Group {
 public:
  static constexpr std::size_t kMaxOrder = 2'000'000;

  Group(const Group&) = delete;
  Group& operator=(const Group&) = delete;

  static GroupPtr free(std::size_t rank, std::vector<std::string> labels = {}) {
    if (rank == 0) throw ValidationError("free group rank must be positive");
    return GroupPtr(new Group(GroupKind::Free, rank, 0, {}, std::move(labels)));
  }

  /// Finite group generated by the given permutations of {0..degree-1}.
  /// Composition convention: (a*b)(x) = a(b(x)).
  static GroupPtr permutations(std::size_t degree, std::vector<Permutation> generators,
                               std::vector<std::string> labels = {}) {
    if (degree == 0) throw ValidationError("permutation degree must be positive");
    for (std::size_t i = 0; i < generators.size(); ++i) {
      const auto& p = generators[i];
      if (p.size() != degree)
        throw ValidationError("generator " + std::to_string(i) + " has wrong length");
      std::vector<bool> seen(degree, false);
      for (int x : p) {
        if (x < 0 || static_cast<std::size_t>(x) >= degree || seen[static_cast<std::size_t>(x)])
          throw ValidationError("generator " + std::to_string(i) + " is not a bijection");
        seen[static_cast<std::size_t>(x)] = true;
      }
    }
    const std::size_t rank = generators.size();
    return GroupPtr(new Group(GroupKind::FinitePerm, rank, degree, std::move(generators),
                              std::move(labels)));
  }

  GroupKind kind() const { return kind_; }
  bool is_free() const { return kind_ == GroupKind::Free; }
  bool is_finite() const { return kind_ == GroupKind::FinitePerm; }
  /// Number of positive generators k.
  std::size_t rank() const { return rank_; }
  std::size_t degree() const { return degree_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Permutation>& permutation_generators() const { return perm_gens_; }

  /// S in canonical order: positives in declaration order, then inverses.
  std::vector<Letter> letters() const {
    std::vector<Letter> s;
    for (std::size_t i = 0; i < rank_; ++i) s.push_back(positive_letter(i));
    for (std::size_t i = 0; i < rank_; ++i) s.push_back(-positive_letter(i));
    return s;
  }

  std::string letter_name(Letter l) const {
    const auto& base = labels_.at(generator_index(l));
    return l > 0 ? base : base + "^-1";
  }

  Element identity() const {
    if (is_free()) return Element(this, {}, 0);
    return elements_.front();
  }

  Element generator(Letter l) const {
    check_letter(l);
    if (is_free()) return Element(this, {l}, 0);
    return elements_[cayley_[0][letter_slot(l)]];
  }

  Element multiply(const Element& a, const Element& b) const {
    check_member(a);
    check_member(b);
    if (is_free()) {
      std::vector<int> w = a.data();
      for (int l : b.data()) push_reduced(w, l);
      return Element(this, std::move(w), 0);
    }
    Permutation c(degree_);
    for (std::size_t x = 0; x < degree_; ++x)
      c[x] = a.data()[static_cast<std::size_t>(b.data()[x])];
    return lookup(std::move(c));
  }

  Element inverse(const Element& a) const {
    check_member(a);
    if (is_free()) {
      std::vector<int> w(a.data().rbegin(), a.data().rend());
      for (int& l : w) l = -l;
      return Element(this, std::move(w), 0);
    }
    Permutation inv(degree_);
    for (std::size_t x = 0; x < degree_; ++x) inv[static_cast<std::size_t>(a.data()[x])] = static_cast<int>(x);
    return lookup(std::move(inv));
  }

  Element power(const Element& a, int n) const {
    Element base = n < 0 ? inverse(a) : a;
    Element r = identity();
    for (int i = 0; i < std::abs(n); ++i) r = multiply(r, base);
    return r;
  }

  Element from_word(const Word& w) const {
    if (is_free()) {
      std::vector<int> r;
      for (Letter l : w) {
        check_letter(l);
        push_reduced(r, l);
      }
      return Element(this, std::move(r), 0);
    }
    std::size_t idx = 0;
    for (Letter l : w) {
      check_letter(l);
      idx = cayley_[idx][letter_slot(l)];
    }
    return elements_[idx];
  }

  /// The reduced word (free) or the shortest BFS witness word (finite).
  Word word(const Element& a) const {
    check_member(a);
    if (is_free()) return a.data();
    return words_[a.index()];
  }

  /// All elements in BFS order, each with a shortest witness word.
  const std::vector<Element>& enumerate() const {
    if (is_free()) throw UnsupportedError("cannot enumerate an infinite free group");
    return elements_;
  }
  std::size_t order() const {
    if (is_free()) throw UnsupportedError("free group has infinite order");
    return elements_.size();
  }

  // Cayley graph access for finite groups: right multiplication g -> g*s.
  std::size_t cayley_next(std::size_t index, Letter l) const { return cayley_.at(index)[letter_slot(l)]; }
  /// True if (index, l) is the BFS tree edge that discovered its target.
  bool is_tree_edge(std::size_t index, Letter l) const {
    const std::size_t t = cayley_next(index, l);
    return t != 0 && parent_[t] == index && parent_letter_[t] == l;
  }

  /// Parse a word like "a b^-1 a^3" or "e" using the generator labels.
  Word parse_word(const std::string& text) const {
    std::istringstream in(text);
    std::string tok;
    Word w;
    while (in >> tok) {
      if (tok == "e" || tok == "1") continue;
      std::string name = tok;
      int exponent = 1;
      if (auto caret = tok.find('^'); caret != std::string::npos) {
        name = tok.substr(0, caret);
        const std::string e = tok.substr(caret + 1);
        char* end = nullptr;
        const long v = std::strtol(e.c_str(), &end, 10);
        if (e.empty() || *end != '\0') throw ValidationError("bad exponent in word '" + text + "'");
        exponent = static_cast<int>(v);
      }
      auto it = std::find(labels_.begin(), labels_.end(), name);
      if (it == labels_.end()) throw ValidationError("unknown generator '" + name + "' in word '" + text + "'");
      const Letter base = positive_letter(static_cast<std::size_t>(it - labels_.begin()));
      for (int i = 0; i < std::abs(exponent); ++i) w.push_back(exponent < 0 ? -base : base);
    }
    return w;
  }

  std::string format_word(const Word& w) const {
    if (w.empty()) return "e";
    std::string s;
    for (std::size_t i = 0; i < w.size();) {
      std::size_t j = i;
      while (j < w.size() && w[j] == w[i]) ++j;
      const int exponent = static_cast<int>(j - i) * (w[i] < 0 ? -1 : 1);
      if (!s.empty()) s += ' ';
      s += labels_[generator_index(w[i])];
      if (exponent != 1) s += "^" + std::to_string(exponent);
      i = j;
    }
    return s;
  }
  std::string format(const Element& a) const { return format_word(word(a)); }

 private:
  Group(GroupKind kind, std::size_t rank, std::size_t degree, std::vector<Permutation> gens,
        std::vector<std::string> labels)
      : kind_(kind), rank_(rank), degree_(degree), perm_gens_(std::move(gens)), labels_(std::move(labels)) {
    if (labels_.empty()) {
      for (std::size_t i = 0; i < rank_; ++i)
        labels_.push_back(rank_ <= 26 ? std::string(1, static_cast<char>('a' + i)) : "s" + std::to_string(i + 1));
    }
    if (labels_.size() != rank_) throw ValidationError("number of labels does not match number of generators");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      const auto& l = labels_[i];
      if (l.empty() || l == "e" || l == "1" || l.find_first_of(" ^\t") != std::string::npos)
        throw ValidationError("invalid generator label '" + l + "'");
      if (std::find(labels_.begin(), labels_.begin() + static_cast<std::ptrdiff_t>(i), l) !=
          labels_.begin() + static_cast<std::ptrdiff_t>(i))
        throw ValidationError("duplicate generator label '" + l + "'");
    }
    if (kind_ == GroupKind::FinitePerm) enumerate_bfs();
  }

  std::size_t letter_slot(Letter l) const {
    return l > 0 ? generator_index(l) : rank_ + generator_index(l);
  }

  void check_letter(Letter l) const {
    if (l == 0 || generator_index(l) >= rank_) throw UsageError("letter out of range");
  }

  void check_member(const Element& a) const {
    if (a.group_ptr() != this) throw UsageError("element belongs to a different group");
  }

  static void push_reduced(std::vector<int>& w, int l) {
    if (!w.empty() && w.back() == -l)
      w.pop_back();
    else
      w.push_back(l);
  }

  Element lookup(Permutation p) const {
    auto it = index_of_.find(p);
    if (it == index_of_.end()) throw UsageError("permutation is not in the enumerated group");
    return elements_[it->second];
  }

  void enumerate_bfs() {
    std::vector<Permutation> gens_by_slot;
    for (Letter l : letters()) {
      const auto& p = perm_gens_[generator_index(l)];
      if (l > 0) {
        gens_by_slot.push_back(p);
      } else {
        Permutation inv(degree_);
        for (std::size_t x = 0; x < degree_; ++x) inv[static_cast<std::size_t>(p[x])] = static_cast<int>(x);
        gens_by_slot.push_back(std::move(inv));
      }
    }
    Permutation id(degree_);
    for (std::size_t x = 0; x < degree_; ++x) id[x] = static_cast<int>(x);

    std::vector<Permutation> perms{id};
    index_of_.emplace(id, 0);
    words_.push_back({});
    parent_.push_back(0);
    parent_letter_.push_back(0);
    const auto all = letters();
    for (std::size_t head = 0; head < perms.size(); ++head) {
      std::vector<std::size_t> row(all.size());
      for (std::size_t k = 0; k < all.size(); ++k) {
        const auto& s = gens_by_slot[k];
        Permutation c(degree_);
        for (std::size_t x = 0; x < degree_; ++x) c[x] = perms[head][static_cast<std::size_t>(s[x])];
        auto [it, inserted] = index_of_.emplace(c, perms.size());
        if (inserted) {
          if (perms.size() >= kMaxOrder) throw ValidationError("permutation group is too large to enumerate");
          Word w = words_[head];
          w.push_back(all[k]);
          words_.push_back(std::move(w));
          parent_.push_back(head);
          parent_letter_.push_back(all[k]);
          perms.push_back(std::move(c));
        }
        row[k] = it->second;
      }
      cayley_.push_back(std::move(row));
    }
    elements_.reserve(perms.size());
    for (std::size_t i = 0; i < perms.size(); ++i) elements_.push_back(Element(this, std::move(perms[i]), i));
  }

  GroupKind kind_;
  std::size_t rank_;
  std::size_t degree_;
  std::vector<Permutation> perm_gens_;
  std::vector<std::string> labels_;

  // Finite groups only.
  std::vector<Element> elements_;
  std::vector<Word> words_;
  std::vector<std::size_t> parent_;
  std::vector<Letter> parent_letter_;
  std::vector<std::vector<std::size_t>> cayley_;
  std::map<Permutation, std::size_t> index_of_;
};

}  // namespace cohom
