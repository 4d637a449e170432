#include <json.hpp>

#include "shape/engine/engine.hpp"
#include "shape/formula/ops.hpp"

namespace shape {

std::string states_to_json(const Report& r) {
  nlohmann::json functions = nlohmann::json::array();
  for (const auto& f : r.states) {
    nlohmann::json nodes = nlohmann::json::object();
    for (std::size_t i = 0; i < f.nodes.size(); ++i) {
      nlohmann::json heaps = nlohmann::json::array();
      for (const auto& h : f.nodes[i].heaps) heaps.push_back(to_string(h));
      nodes[std::to_string(i)] = std::move(heaps);
    }
    functions.push_back({{"name", f.function}, {"pre", to_string(f.pre)}, {"nodes", std::move(nodes)}});
  }
  return nlohmann::json{{"functions", std::move(functions)}}.dump(2);
}

}  // namespace shape
