#pragma once

// Random heaps built to contain at least one foldable pair: a chain of cells
// and segments of one list shape hanging off program variable `x`, ending at
// nil or at `z`, which is then allocated, freed or the start of a possibly
// empty rest. Seeded, so every run sees the same heaps.

#include <random>
#include <string>

#include "shape/formula/formula.hpp"

namespace acceptance {

using namespace shape;

class FoldGenerator {
 public:
  explicit FoldGenerator(unsigned seed) : rng_(seed) {}

  SymbolicHeap next() {
    switch (pick(0, 4)) {
      case 0:
      case 1:
        return sll();
      case 2:
      case 3:
        return dll();
      default:
        return nll();
    }
  }

 private:
  std::mt19937 rng_;

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return pick(0, 1) == 1; }

  static Var ex(SymbolicHeap& h, int i) {
    Var v{"e" + std::to_string(i)};
    h.existentials.insert(v);
    return v;
  }

  // Where the chain ends, plus whatever keeps `z` nil or allocated.
  Var tail(SymbolicHeap& h, const std::string& link) {
    switch (pick(0, 4)) {
      case 0:
        return Var::nil();
      case 1:
        h.spatial.push_back(PointsTo{"z", {{link, Var::nil()}}});
        return "z";
      case 2:
        h.spatial.push_back(Freed{"z"});
        return "z";
      case 3:
        h.spatial.push_back(Ls{0, "z", Var::nil(), link});
        return "z";
      default:
        h.spatial.push_back(Ls{1, "z", Var::nil(), link});
        return "z";
    }
  }

  void extras(SymbolicHeap& h) {
    if (coin()) h.pure.push_back(Neq{"x", Var::nil()});
    if (pick(0, 3) == 0) h.spatial.push_back(PointsTo{"w", {{"next", Var::nil()}}});
  }

  SymbolicHeap sll() {
    SymbolicHeap h;
    int n = pick(2, 4);
    Var end = tail(h, "next");
    Var cur = "x";
    for (int i = 0; i < n; ++i) {
      Var nxt = i + 1 == n ? end : ex(h, i);
      if (pick(0, 2) == 0)
        h.spatial.push_back(Ls{pick(0, 2), cur, nxt});
      else
        h.spatial.push_back(PointsTo{cur, {{"next", nxt}}});
      cur = nxt;
    }
    extras(h);
    return h;
  }

  // Pieces are single cells or segments of at least one cell, each with a
  // first and a last location.
  SymbolicHeap dll() {
    SymbolicHeap h;
    int n = pick(2, 3);
    std::vector<std::pair<Var, Var>> ends;
    std::vector<int> seg;
    int fresh = 0;
    for (int i = 0; i < n; ++i) {
      Var first = i == 0 ? Var{"x"} : ex(h, fresh++);
      int min = pick(0, 2) == 0 ? pick(1, 2) : 0;
      Var last = min > 0 ? ex(h, fresh++) : first;
      ends.emplace_back(first, last);
      seg.push_back(min);
    }
    Var after = coin() ? Var::nil() : Var{"z"};
    if (!after.is_nil()) h.spatial.push_back(coin() ? SpatialAtom{Freed{"z"}} : PointsTo{"z", {{"next", Var::nil()}}});
    for (int i = 0; i < n; ++i) {
      Var prev = i == 0 ? Var::nil() : ends[i - 1].second;
      Var next = i + 1 == n ? after : ends[i + 1].first;
      if (seg[i] > 0)
        h.spatial.push_back(Dls{seg[i], ends[i].first, ends[i].second, prev, next});
      else
        h.spatial.push_back(PointsTo{ends[i].first, {{"next", next}, {"prev", prev}}});
    }
    extras(h);
    return h;
  }

  SymbolicHeap nll() {
    SymbolicHeap h;
    int n = pick(2, 3);
    int fresh = 0;
    Var cur = "x";
    for (int i = 0; i < n; ++i) {
      Var nxt = i + 1 == n ? Var::nil() : ex(h, fresh++);
      if (pick(0, 3) == 0) {
        h.spatial.push_back(Nls{pick(1, 2), cur, nxt, Var::nil()});
      } else {
        Var inner = Var::nil();
        switch (pick(0, 2)) {
          case 0:
            break;
          case 1:
            inner = ex(h, fresh++);
            h.spatial.push_back(PointsTo{inner, {{"next", Var::nil()}}});
            break;
          default:
            inner = ex(h, fresh++);
            h.spatial.push_back(Ls{pick(0, 2), inner, Var::nil()});
        }
        h.spatial.push_back(PointsTo{cur, {{"nested", inner}, {"next", nxt}}});
      }
      cur = nxt;
    }
    extras(h);
    return h;
  }
};

}  // namespace acceptance
