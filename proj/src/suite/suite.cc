// Copyright 2026 The CohGym Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cohgym/suite/suite.h"

#include <algorithm>
#include <charconv>
#include <limits>
#include <set>

#include <nlohmann/json.hpp>

#include "cohgym/error.h"

namespace cohgym {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const Condition* Item::find_condition(std::string_view name) const {
  for (const auto& c : conditions) {
    if (c.condition_name == name) return &c;
  }
  return nullptr;
}

bool IsKnownPhenomenon(std::string_view phenomenon) {
  return std::find(std::begin(kPhenomena), std::end(kPhenomena), phenomenon) !=
         std::end(kPhenomena);
}

bool RequiresSeparator(const TestSuite& suite) {
  return suite.phenomenon == "speaker_commitment";
}

namespace {

bool HasControlChar(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u < 0x20 || u == 0x7f;
  });
}

std::string ItemPath(std::size_t i) { return "items[" + std::to_string(i) + "]"; }

}  // namespace

void ValidateSuite(const TestSuite& suite) {
  if (suite.name.empty()) throw SchemaViolation("name", "must be non-empty");
  if (!IsKnownPhenomenon(suite.phenomenon)) {
    throw SchemaViolation("phenomenon",
                          "unknown phenomenon '" + suite.phenomenon + "'");
  }
  for (const auto& [number, label] : suite.region_meta) {
    if (number <= 0) {
      throw SchemaViolation("region_meta", "region numbers must be positive");
    }
  }
  if (suite.items.empty()) throw SchemaViolation("items", "must be non-empty");

  std::set<int> item_numbers;
  std::set<std::string> reference_names;
  for (std::size_t i = 0; i < suite.items.size(); ++i) {
    const Item& item = suite.items[i];
    const std::string path = ItemPath(i);
    if (item.item_number <= 0) {
      throw SchemaViolation(path + ".item_number", "must be positive");
    }
    if (!item_numbers.insert(item.item_number).second) {
      throw SchemaViolation(path + ".item_number",
                            "duplicate item_number " +
                                std::to_string(item.item_number));
    }
    if (item.conditions.size() < 2) {
      throw SchemaViolation(path + ".conditions",
                            "an item needs at least two conditions");
    }

    std::set<std::string> names;
    for (std::size_t c = 0; c < item.conditions.size(); ++c) {
      const Condition& cond = item.conditions[c];
      const std::string cpath = path + ".conditions[" + std::to_string(c) + "]";
      if (cond.condition_name.empty()) {
        throw SchemaViolation(cpath + ".condition_name", "must be non-empty");
      }
      if (!names.insert(cond.condition_name).second) {
        throw SchemaViolation(cpath + ".condition_name",
                              "duplicate condition '" + cond.condition_name +
                                  "'");
      }
      if (cond.regions.empty()) {
        throw SchemaViolation(cpath + ".regions", "must be non-empty");
      }
      for (std::size_t r = 0; r < cond.regions.size(); ++r) {
        const Region& region = cond.regions[r];
        if (HasControlChar(region.content)) {
          throw SchemaViolation(
              cpath + ".regions[" + std::to_string(r) + "].content",
              "control characters are not allowed");
        }
        if (region.region_number != static_cast<int>(r) + 1) {
          throw InconsistentConditions(
              item.item_number,
              "condition '" + cond.condition_name + "' expected region " +
                  std::to_string(r + 1) + ", found " +
                  std::to_string(region.region_number));
        }
        if (suite.region_meta.count(region.region_number) == 0) {
          throw SchemaViolation(
              cpath + ".regions[" + std::to_string(r) + "].region_number",
              "region " + std::to_string(region.region_number) +
                  " has no region_meta label");
        }
      }
      if (cond.regions.size() != item.conditions.front().regions.size()) {
        throw InconsistentConditions(
            item.item_number, "condition '" + cond.condition_name + "' has " +
                                  std::to_string(cond.regions.size()) +
                                  " regions, expected " +
                                  std::to_string(
                                      item.conditions.front().regions.size()));
      }
    }
    if (i == 0) {
      reference_names = names;
    } else if (names != reference_names) {
      throw InconsistentConditions(
          item.item_number, "condition names differ from the first item");
    }
  }

  for (std::size_t p = 0; p < suite.predictions.size(); ++p) {
    const std::string path = "predictions[" + std::to_string(p) + "]";
    const Prediction& pred = suite.predictions[p];
    if (!pred.expr) throw SchemaViolation(path, "missing expression");
    ForEachAggregate(*pred.expr, [&](const Aggregate& agg) {
      if (reference_names.count(agg.condition) == 0) {
        throw SchemaViolation(path,
                              "unknown condition '" + agg.condition + "'");
      }
      if (agg.regions.is_all()) return;
      for (int r : agg.regions.regions()) {
        if (suite.region_meta.count(r) == 0) {
          throw SchemaViolation(path, "region " + std::to_string(r) +
                                          " is not declared in region_meta");
        }
        for (const Item& item : suite.items) {
          if (r > static_cast<int>(item.conditions.front().regions.size())) {
            throw SchemaViolation(path, "region " + std::to_string(r) +
                                            " is missing from item " +
                                            std::to_string(item.item_number));
          }
        }
      }
    });
  }
}

namespace {

const json& Field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw SchemaViolation(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaViolation(path + "." + key, "missing");
  return *it;
}

std::string StringField(const json& obj, const char* key,
                        const std::string& path) {
  const json& v = Field(obj, key, path);
  if (!v.is_string()) {
    throw SchemaViolation(path + "." + key, "expected a string");
  }
  return v.get<std::string>();
}

int IntField(const json& obj, const char* key, const std::string& path) {
  const json& v = Field(obj, key, path);
  if (!v.is_number_integer()) {
    throw SchemaViolation(path + "." + key, "expected an integer");
  }
  const auto value = v.get<long long>();
  if (value <= 0 || value > std::numeric_limits<int>::max()) {
    throw SchemaViolation(path + "." + key, "expected a positive integer");
  }
  return static_cast<int>(value);
}

const json& ArrayField(const json& obj, const char* key,
                       const std::string& path) {
  const json& v = Field(obj, key, path);
  if (!v.is_array()) throw SchemaViolation(path + "." + key, "expected an array");
  return v;
}

void RejectUnknownKeys(const json& obj, std::initializer_list<const char*> keys,
                       const std::string& path) {
  if (!obj.is_object()) {
    throw SchemaViolation(path.empty() ? "$" : path, "expected an object");
  }
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(),
                     [&](const char* k) { return key == k; })) {
      throw SchemaViolation(path.empty() ? key : path + "." + key,
                            "unknown field");
    }
  }
}

Region ParseRegion(const json& j, const std::string& path) {
  RejectUnknownKeys(j, {"region_number", "content"}, path);
  return Region{IntField(j, "region_number", path),
                StringField(j, "content", path)};
}

Condition ParseCondition(const json& j, const std::string& path) {
  RejectUnknownKeys(j, {"condition_name", "regions"}, path);
  Condition cond;
  cond.condition_name = StringField(j, "condition_name", path);
  const json& regions = ArrayField(j, "regions", path);
  for (std::size_t r = 0; r < regions.size(); ++r) {
    cond.regions.push_back(
        ParseRegion(regions[r], path + ".regions[" + std::to_string(r) + "]"));
  }
  return cond;
}

Item ParseItem(const json& j, const std::string& path) {
  RejectUnknownKeys(j, {"item_number", "tags", "conditions"}, path);
  Item item;
  item.item_number = IntField(j, "item_number", path);
  if (auto it = j.find("tags"); it != j.end()) {
    if (!it->is_object()) {
      throw SchemaViolation(path + ".tags", "expected an object");
    }
    for (const auto& [key, value] : it->items()) {
      if (!value.is_string()) {
        throw SchemaViolation(path + ".tags." + key, "expected a string");
      }
      item.tags.emplace(key, value.get<std::string>());
    }
  }
  const json& conditions = ArrayField(j, "conditions", path);
  for (std::size_t c = 0; c < conditions.size(); ++c) {
    item.conditions.push_back(ParseCondition(
        conditions[c], path + ".conditions[" + std::to_string(c) + "]"));
  }
  return item;
}

int ParseRegionKey(const std::string& key) {
  int value = 0;
  const char* end = key.data() + key.size();
  auto [ptr, ec] = std::from_chars(key.data(), end, value);
  if (ec != std::errc() || ptr != end || value <= 0) {
    throw SchemaViolation("region_meta." + key,
                          "keys must be positive region numbers");
  }
  return value;
}

}  // namespace

TestSuite ParseSuite(std::string_view utf8_json) {
  json root;
  try {
    root = json::parse(utf8_json);
  } catch (const json::parse_error& e) {
    throw MalformedJson(e.what());
  }
  if (!root.is_object()) throw SchemaViolation("$", "expected an object");
  RejectUnknownKeys(root,
                    {"name", "phenomenon", "region_meta", "predictions", "items"},
                    "");

  TestSuite suite;
  suite.name = StringField(root, "name", "$");
  suite.phenomenon = StringField(root, "phenomenon", "$");

  const json& meta = Field(root, "region_meta", "$");
  if (!meta.is_object()) {
    throw SchemaViolation("region_meta", "expected an object");
  }
  for (const auto& [key, value] : meta.items()) {
    if (!value.is_string()) {
      throw SchemaViolation("region_meta." + key, "expected a string");
    }
    suite.region_meta.emplace(ParseRegionKey(key), value.get<std::string>());
  }

  const json& predictions = ArrayField(root, "predictions", "$");
  for (std::size_t p = 0; p < predictions.size(); ++p) {
    const std::string path = "predictions[" + std::to_string(p) + "]";
    if (!predictions[p].is_string()) {
      throw SchemaViolation(path, "expected a formula string");
    }
    Prediction pred;
    pred.formula = predictions[p].get<std::string>();
    try {
      pred.expr = ParsePrediction(pred.formula);
    } catch (const ParseError& e) {
      throw SchemaViolation(path, e.what());
    }
    suite.predictions.push_back(std::move(pred));
  }

  const json& items = ArrayField(root, "items", "$");
  for (std::size_t i = 0; i < items.size(); ++i) {
    suite.items.push_back(ParseItem(items[i], ItemPath(i)));
  }
  std::stable_sort(suite.items.begin(), suite.items.end(),
                   [](const Item& a, const Item& b) {
                     return a.item_number < b.item_number;
                   });

  ValidateSuite(suite);
  return suite;
}

std::string SerializeSuite(const TestSuite& suite) {
  ordered_json root;
  root["name"] = suite.name;
  root["phenomenon"] = suite.phenomenon;
  ordered_json meta = ordered_json::object();
  for (const auto& [number, label] : suite.region_meta) {
    meta[std::to_string(number)] = label;
  }
  root["region_meta"] = std::move(meta);
  ordered_json predictions = ordered_json::array();
  for (const auto& p : suite.predictions) {
    predictions.push_back(PrintPrediction(*p.expr));
  }
  root["predictions"] = std::move(predictions);

  std::vector<const Item*> sorted;
  for (const auto& item : suite.items) sorted.push_back(&item);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Item* a, const Item* b) {
                     return a->item_number < b->item_number;
                   });

  ordered_json items = ordered_json::array();
  for (const Item* item : sorted) {
    ordered_json j;
    j["item_number"] = item->item_number;
    ordered_json tags = ordered_json::object();
    for (const auto& [k, v] : item->tags) tags[k] = v;
    j["tags"] = std::move(tags);
    ordered_json conditions = ordered_json::array();
    for (const auto& cond : item->conditions) {
      ordered_json c;
      c["condition_name"] = cond.condition_name;
      ordered_json regions = ordered_json::array();
      for (const auto& region : cond.regions) {
        ordered_json r;
        r["region_number"] = region.region_number;
        r["content"] = region.content;
        regions.push_back(std::move(r));
      }
      c["regions"] = std::move(regions);
      conditions.push_back(std::move(c));
    }
    j["conditions"] = std::move(conditions);
    items.push_back(std::move(j));
  }
  root["items"] = std::move(items);
  return root.dump(2) + "\n";
}

}  // namespace cohgym
