#include "shape/formula/formula.hpp"

#include <algorithm>

#include "shape/util/overloaded.hpp"

namespace shape {

const FieldValue* PointsTo::field(const std::string& f) const {
  for (const auto& [name, value] : fields)
    if (name == f) return &value;
  return nullptr;
}

FieldValue* PointsTo::field(const std::string& f) {
  for (auto& [name, value] : fields)
    if (name == f) return &value;
  return nullptr;
}

void collect_vars(const FieldValue& v, std::set<Var>& out) {
  if (const auto* var = std::get_if<Var>(&v)) out.insert(*var);
}

void collect_vars(const PureAtom& a, std::set<Var>& out) {
  std::visit(overloaded{
                 [&](const Eq& e) { out.insert(e.a), out.insert(e.b); },
                 [&](const Neq& e) { out.insert(e.a), out.insert(e.b); },
                 [&](const IntVal& e) { out.insert(e.x); },
             },
             a);
}

void collect_vars(const SpatialAtom& a, std::set<Var>& out) {
  std::visit(overloaded{
                 [&](const PointsTo& p) {
                   out.insert(p.src);
                   for (const auto& [name, value] : p.fields) collect_vars(value, out);
                 },
                 [&](const Ls& l) { out.insert(l.src), out.insert(l.dst); },
                 [&](const Dls& d) {
                   out.insert(d.first), out.insert(d.last);
                   out.insert(d.prev_of_first), out.insert(d.next_of_last);
                 },
                 [&](const Nls& n) { out.insert(n.src), out.insert(n.dst), out.insert(n.sink); },
                 [&](const Freed& f) { out.insert(f.loc); },
             },
             a);
}

bool mentions(const PureAtom& a, const Var& v) {
  std::set<Var> vs;
  collect_vars(a, vs);
  return vs.count(v) > 0;
}

bool mentions(const SpatialAtom& a, const Var& v) {
  std::set<Var> vs;
  collect_vars(a, vs);
  return vs.count(v) > 0;
}

int min_cells(const SpatialAtom& a) {
  return std::visit(overloaded{
                        [](const PointsTo&) { return 1; },
                        [](const Ls& l) { return l.min; },
                        [](const Dls& d) { return d.min; },
                        [](const Nls& n) { return n.min; },
                        [](const Freed&) { return 0; },
                    },
                    a);
}

bool is_list_atom(const SpatialAtom& a) {
  return std::holds_alternative<Ls>(a) || std::holds_alternative<Dls>(a) ||
         std::holds_alternative<Nls>(a);
}

VarKind SymbolicHeap::kind_of(const Var& v) const {
  if (v.is_nil()) return VarKind::Nil;
  return is_existential(v) ? VarKind::Existential : VarKind::Program;
}

std::set<Var> SymbolicHeap::vars() const {
  std::set<Var> out;
  for (const auto& a : pure) collect_vars(a, out);
  for (const auto& a : spatial) collect_vars(a, out);
  return out;
}

std::set<Var> SymbolicHeap::free_vars() const {
  std::set<Var> out;
  for (const auto& v : vars())
    if (!v.is_nil() && !is_existential(v)) out.insert(v);
  return out;
}

bool StateSet::insert(SymbolicHeap h) {
  if (contains(h)) return false;
  heaps.push_back(std::move(h));
  return true;
}

bool StateSet::contains(const SymbolicHeap& h) const {
  return std::find(heaps.begin(), heaps.end(), h) != heaps.end();
}

}  // namespace shape
