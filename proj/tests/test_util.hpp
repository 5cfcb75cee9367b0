#pragma once

#include <functional>
#include <vector>

#include "oblsynth/dfa.hpp"
#include "oblsynth/ltlf.hpp"
#include "oblsynth/obligation.hpp"

namespace testutil {

using namespace oblsynth;

// Every trace over `atoms` with length in [min_len, max_len].
inline void for_each_trace(std::size_t atoms, std::size_t min_len, std::size_t max_len,
                           const std::function<void(const FiniteTrace&)>& fn) {
  const Letter letters = Letter{1} << atoms;
  FiniteTrace t;
  std::function<void()> rec = [&] {
    if (t.size() >= min_len) fn(t);
    if (t.size() == max_len) return;
    for (Letter a = 0; a < letters; ++a) {
      t.letters.push_back(a);
      rec();
      t.letters.pop_back();
    }
  };
  rec();
}

inline void for_each_lasso(std::size_t atoms, std::size_t max_u, std::size_t max_v,
                           const std::function<void(const Lasso&)>& fn) {
  for_each_trace(atoms, 0, max_u, [&](const FiniteTrace& u) {
    for_each_trace(atoms, 1, max_v, [&](const FiniteTrace& v) { fn(Lasso(u, v)); });
  });
}

// Satisfaction clauses written out directly on the trace; i == |t| is the empty suffix.
inline bool holds(const LtlfFormula& f, const Alphabet& ab, const FiniteTrace& t, std::size_t i) {
  const std::size_t n = t.size();
  switch (f.kind()) {
    case LtlfKind::True:
      return true;
    case LtlfKind::False:
      return false;
    case LtlfKind::Atom:
      return i < n && ((t.letters[i] >> ab.index_of(f.name())) & 1);
    case LtlfKind::Not:
      return !holds(f.child(0), ab, t, i);
    case LtlfKind::And:
      return holds(f.child(0), ab, t, i) && holds(f.child(1), ab, t, i);
    case LtlfKind::Or:
      return holds(f.child(0), ab, t, i) || holds(f.child(1), ab, t, i);
    case LtlfKind::StrongNext:
      return i + 1 < n && holds(f.child(0), ab, t, i + 1);
    case LtlfKind::WeakNext:
      return i + 1 >= n || holds(f.child(0), ab, t, i + 1);
    case LtlfKind::Until:
      for (std::size_t k = i; k < n; ++k) {
        if (holds(f.child(1), ab, t, k)) return true;
        if (!holds(f.child(0), ab, t, k)) return false;
      }
      return false;
    case LtlfKind::Eventually:
      for (std::size_t k = i; k < n; ++k)
        if (holds(f.child(0), ab, t, k)) return true;
      return false;
    case LtlfKind::Always:
      for (std::size_t k = i; k < n; ++k)
        if (!holds(f.child(0), ab, t, k)) return false;
      return true;
  }
  return false;
}

inline FiniteTrace prefix(const Lasso& l, std::size_t len) {
  FiniteTrace t;
  for (std::size_t i = 0; i < len; ++i) t.letters.push_back(l.at(i));
  return t;
}

// Prefix quantification by enumeration of nonempty prefixes up to |u| + |v| * bound.
inline bool obligation_holds(const ObligationFormula& psi, const Alphabet& ab, const Lasso& l, std::size_t bound) {
  switch (psi.kind()) {
    case ObligationKind::Exists:
    case ObligationKind::Forall: {
      const bool ex = psi.kind() == ObligationKind::Exists;
      const std::size_t max_len = l.stem.size() + l.loop.size() * bound;
      for (std::size_t len = 1; len <= max_len; ++len) {
        bool v = holds(psi.body(), ab, prefix(l, len), 0);
        if (ex && v) return true;
        if (!ex && !v) return false;
      }
      return !ex;
    }
    case ObligationKind::Not:
      return !obligation_holds(psi.child(0), ab, l, bound);
    case ObligationKind::And:
      for (const auto& c : psi.children())
        if (!obligation_holds(c, ab, l, bound)) return false;
      return true;
    case ObligationKind::Or:
      for (const auto& c : psi.children())
        if (obligation_holds(c, ab, l, bound)) return true;
      return false;
  }
  return false;
}

inline FiniteTrace trace(const Alphabet& ab, const std::vector<std::set<std::string>>& letters) {
  FiniteTrace t;
  for (const auto& s : letters) t.letters.push_back(ab.letter(s));
  return t;
}

}  // namespace testutil
