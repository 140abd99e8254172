#pragma once

#include <cmath>
#include <numbers>

#include "cohom/cohom.hpp"

namespace fixtures {

using namespace cohom;

inline MatrixXd rotation(double theta) {
  MatrixXd r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

inline MatrixXd rot120() { return rotation(2.0 * std::numbers::pi / 3.0); }

// Free(1), a -> rotation by 2pi/3.
inline RepresentationPtr anchor_a() {
  return Representation::make(Group::free(1), NormedSpace(2, 2.0), {rot120()}, IsometryFamily::Orthogonal);
}

// Free(2), both generators -> rotation by 2pi/3.
inline RepresentationPtr anchor_b() {
  return Representation::make(Group::free(2), NormedSpace(2, 2.0), {rot120(), rot120()}, IsometryFamily::Orthogonal);
}

inline GroupPtr s3() { return Group::permutations(3, {{1, 0, 2}, {1, 2, 0}}, {"s", "t"}); }

// S_3 standard representation: s -> diag(-1, 1), t -> rotation by 2pi/3.
inline RepresentationPtr anchor_c() {
  MatrixXd s(2, 2);
  s << -1, 0, 0, 1;
  return Representation::make(s3(), NormedSpace(2, 2.0), {s, rot120()}, IsometryFamily::Orthogonal);
}

inline std::vector<exact::Matrix> anchor_c_exact() {
  using exact::EntryParser;
  auto e = [](const char* t) { return EntryParser::parse(t); };
  exact::Matrix s{{e("-1"), e("0")}, {e("0"), e("1")}};
  exact::Matrix t{{e("-1/2"), e("-sqrt(3)/2")}, {e("sqrt(3)/2"), e("-1/2")}};
  return {s, t};
}

// sgn(sigma) P_sigma on R^3 with the given exponent.
inline RepresentationPtr s3_signed(double p) {
  MatrixXd s(3, 3), t(3, 3);
  s << 0, -1, 0, -1, 0, 0, 0, 0, -1;
  t << 0, 0, 1, 1, 0, 0, 0, 1, 0;
  return Representation::make(s3(), NormedSpace(3, p), {s, t}, IsometryFamily::SignedPermutation);
}

}  // namespace fixtures
