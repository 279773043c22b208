#pragma once

#include <cmath>
#include <string>

#include <json.hpp>

#include "cluscov/model.hpp"

namespace cluscov {

namespace detail {

inline Rational rational_from_json(const nlohmann::json& v,
                                   const std::string& where) {
  try {
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_number_unsigned()) return Rational(v.get<unsigned long long>());
    // Floats are re-serialized (shortest round-trip decimal) and converted
    // exactly with a base-10 denominator.
    if (v.is_number_float()) {
      double d = v.get<double>();
      if (!std::isfinite(d))
        throw ValidationError("non-finite number in " + where);
      return parse_rational(v.dump());
    }
    if (v.is_string()) return parse_rational(v.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ValidationError(where + ": " + e.what());
  }
  throw ValidationError(where + ": expected a rational value");
}

inline void reject_unknown_fields(const nlohmann::json& obj,
                                  std::initializer_list<const char*> allowed,
                                  const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* a : allowed) known |= (it.key() == a);
    if (!known)
      throw ValidationError("unknown field '" + it.key() + "' in " + where);
  }
}

}  // namespace detail

/// Parses an instance document; the result is not yet normalized.
inline Instance parse_instance(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("instance must be an object");
  detail::reject_unknown_fields(
      doc, {"kind", "items", "sets", "knapsacks", "clusters"}, "instance");

  Instance inst;
  inst.kind = kind_from_string(doc.value("kind", "mcpc"));
  for (const auto& j : doc.value("items", nlohmann::json::array())) {
    detail::reject_unknown_fields(j, {"id", "profit"}, "item");
    Item item;
    item.id = j.at("id").get<int>();
    item.profit = detail::rational_from_json(j.at("profit"), "item profit");
    inst.items.push_back(item);
  }
  for (const auto& j : doc.value("sets", nlohmann::json::array())) {
    detail::reject_unknown_fields(j, {"id", "cost", "items"}, "set");
    CoverSet s;
    s.id = j.at("id").get<int>();
    s.cost = detail::rational_from_json(j.at("cost"), "set cost");
    for (const auto& i : j.at("items")) s.items.push_back(i.get<int>());
    inst.sets.push_back(s);
  }
  for (const auto& j : doc.value("knapsacks", nlohmann::json::array())) {
    detail::reject_unknown_fields(j, {"id", "capacity", "cluster"},
                                  "knapsack");
    Knapsack k;
    k.id = j.at("id").get<int>();
    k.capacity =
        detail::rational_from_json(j.at("capacity"), "knapsack capacity");
    k.cluster = j.at("cluster").get<int>();
    inst.knapsacks.push_back(k);
  }
  for (const auto& j : doc.value("clusters", nlohmann::json::array())) {
    detail::reject_unknown_fields(j, {"id", "capacity"}, "cluster");
    Cluster c;
    c.id = j.at("id").get<int>();
    c.capacity =
        detail::rational_from_json(j.at("capacity"), "cluster capacity");
    inst.clusters.push_back(c);
  }
  return inst;
}

inline nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json doc;
  doc["kind"] = kind_to_string(inst.kind);
  doc["items"] = nlohmann::json::array();
  for (const auto& it : inst.items)
    doc["items"].push_back(
        {{"id", it.id}, {"profit", rational_to_string(it.profit)}});
  doc["sets"] = nlohmann::json::array();
  for (const auto& s : inst.sets)
    doc["sets"].push_back({{"id", s.id},
                           {"cost", rational_to_string(s.cost)},
                           {"items", s.items}});
  doc["knapsacks"] = nlohmann::json::array();
  for (const auto& k : inst.knapsacks)
    doc["knapsacks"].push_back({{"id", k.id},
                                {"capacity", rational_to_string(k.capacity)},
                                {"cluster", k.cluster}});
  doc["clusters"] = nlohmann::json::array();
  for (const auto& c : inst.clusters)
    doc["clusters"].push_back(
        {{"id", c.id}, {"capacity", rational_to_string(c.capacity)}});
  return doc;
}

inline std::string serialize_instance(const Instance& inst) {
  return instance_to_json(inst).dump(2) + "\n";
}

inline nlohmann::json assignment_to_json(const Instance& inst,
                                         const Assignment& a) {
  nlohmann::json doc;
  doc["assignment"] = nlohmann::json::object();
  for (int j = 0; j < inst.num_sets(); ++j) {
    if (a[j] == kUnassigned)
      doc["assignment"][std::to_string(j)] = nullptr;
    else
      doc["assignment"][std::to_string(j)] = a[j];
  }
  doc["value"] = rational_to_string(evaluate_assignment(inst, a));
  return doc;
}

inline Assignment parse_assignment(const Instance& inst,
                                   const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
  Assignment a(inst.num_sets());
  for (auto it = doc.at("assignment").begin(); it != doc.at("assignment").end();
       ++it) {
    int j = std::stoi(it.key());
    if (j < 0 || j >= inst.num_sets())
      throw ValidationError("assignment references unknown set " + it.key());
    if (!it.value().is_null()) a.assign(j, it.value().get<int>());
  }
  return a;
}

}  // namespace cluscov
