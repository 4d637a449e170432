#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "shape/formula/formula.hpp"

namespace shape {

/// Location id in a HeapModel. 0 is nil; 1..num_locations are the model's
/// locations. Larger ids are used internally for locations outside the model.
using Loc = int;
inline constexpr Loc kNilLoc = 0;

struct Ptr {
  Loc loc = kNilLoc;
  auto operator<=>(const Ptr&) const = default;
  bool operator==(const Ptr&) const = default;
};

using CellValue = std::variant<Ptr, std::int64_t, UnknownInt>;

struct Cell {
  /// Sorted by field name.
  std::vector<std::pair<std::string, CellValue>> fields;

  const CellValue* field(const std::string& f) const;
  bool operator==(const Cell&) const = default;
};

/// A concrete stack-and-heap structure with finitely many locations.
struct HeapModel {
  int num_locations = 0;
  std::map<Var, Loc> stack;
  /// Integer variables with a known value; absent means untracked.
  std::map<Var, std::int64_t> ints;
  std::map<Loc, Cell> heap;
  std::set<Loc> freed;

  bool is_allocated(Loc l) const { return heap.count(l) > 0; }
  bool well_formed() const;
  bool operator==(const HeapModel&) const = default;
};

std::string to_json_string(const HeapModel& m);

}  // namespace shape
