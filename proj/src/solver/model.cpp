#include "shape/solver/model.hpp"

#include <json.hpp>

#include "shape/util/overloaded.hpp"

namespace shape {

const CellValue* Cell::field(const std::string& f) const {
  for (const auto& [name, value] : fields)
    if (name == f) return &value;
  return nullptr;
}

bool HeapModel::well_formed() const {
  auto in_range = [&](Loc l) { return l >= 0 && l <= num_locations; };
  if (heap.count(kNilLoc) || freed.count(kNilLoc)) return false;
  for (Loc l : freed)
    if (heap.count(l) || !in_range(l)) return false;
  for (const auto& [v, l] : stack)
    if (!in_range(l)) return false;
  for (const auto& [l, cell] : heap) {
    if (!in_range(l)) return false;
    for (const auto& [f, value] : cell.fields)
      if (const auto* p = std::get_if<Ptr>(&value); p && !in_range(p->loc)) return false;
  }
  return true;
}

namespace {

std::string loc_name(Loc l) { return l == kNilLoc ? "nil" : "l" + std::to_string(l); }

}  // namespace

std::string to_json_string(const HeapModel& m) {
  using nlohmann::json;
  json j;
  j["locations"] = json::array();
  for (Loc l = 1; l <= m.num_locations; ++l) j["locations"].push_back(loc_name(l));
  j["stack"] = json::object();
  for (const auto& [v, l] : m.stack) j["stack"][v.name] = loc_name(l);
  j["ints"] = json::object();
  for (const auto& [v, n] : m.ints) j["ints"][v.name] = n;
  j["heap"] = json::object();
  for (const auto& [l, cell] : m.heap) {
    json c = json::object();
    for (const auto& [f, value] : cell.fields) {
      std::visit(overloaded{
                     [&](const Ptr& p) { c[f] = loc_name(p.loc); },
                     [&](std::int64_t n) { c[f] = n; },
                     [&](const UnknownInt&) { c[f] = nullptr; },
                 },
                 value);
    }
    j["heap"][loc_name(l)] = c;
  }
  j["freed"] = json::array();
  for (Loc l : m.freed) j["freed"].push_back(loc_name(l));
  return j.dump();
}

}  // namespace shape
