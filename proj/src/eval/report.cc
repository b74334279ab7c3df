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

#include "cohgym/eval/report.h"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <set>

#include "cohgym/error.h"

namespace cohgym {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

SuiteReport BuildSuiteReport(const TestSuite& suite,
                             std::vector<ItemResult> results) {
  std::sort(results.begin(), results.end(),
            [](const ItemResult& a, const ItemResult& b) {
              return a.item_number < b.item_number;
            });
  SuiteReport report;
  report.suite_name = suite.name;
  report.phenomenon = suite.phenomenon;
  report.item_count = results.size();

  std::set<std::string> tag_keys;
  for (const auto& item : suite.items) {
    for (const auto& [key, value] : item.tags) tag_keys.insert(key);
  }
  for (std::size_t p = 0; p < suite.predictions.size(); ++p) {
    PredictionReport pr;
    pr.formula = PrintPrediction(*suite.predictions[p].expr);
    pr.tally = TallyPrediction(results, p);
    for (const auto& key : tag_keys) pr.groups[key] = GroupReport(results, key, p);
    if (suite.phenomenon == "connectives" && tag_keys.count("sense") &&
        tag_keys.count("substitute")) {
      pr.grid = GridBreakdown{"sense", "substitute",
                              GridReport(results, "sense", "substitute", p)};
    }
    report.predictions.push_back(std::move(pr));
  }
  report.items = std::move(results);
  return report;
}

namespace {

ordered_json TallyToJson(const Tally& t) {
  ordered_json j;
  const auto acc = t.accuracy();
  j["accuracy"] = acc ? ordered_json(*acc) : ordered_json(nullptr);
  j["item_count"] = t.total();
  j["met"] = t.met;
  j["not_met"] = t.not_met;
  j["tie_count"] = t.tie;
  j["undefined_count"] = t.undefined;
  return j;
}

Tally TallyFromJson(const json& j) {
  Tally t;
  t.met = j.at("met").get<std::size_t>();
  t.not_met = j.at("not_met").get<std::size_t>();
  t.tie = j.at("tie_count").get<std::size_t>();
  t.undefined = j.at("undefined_count").get<std::size_t>();
  return t;
}

ordered_json BackendToJson(const BackendInfo& info) {
  ordered_json j;
  j["backend_name"] = info.backend_name;
  j["supports_separator"] = info.supports_separator;
  j["separator_literal"] = info.separator_literal;
  j["token_marker"] = info.token_marker;
  j["first_token_context"] = info.first_token_context;
  return j;
}

}  // namespace

ordered_json ResultsToJson(const RunResults& results) {
  ordered_json root;
  root["schema_version"] = kResultsSchemaVersion;
  root["backend"] = BackendToJson(results.backend);
  ordered_json suites = ordered_json::array();
  for (const auto& s : results.suites) {
    ordered_json js;
    js["name"] = s.suite_name;
    js["phenomenon"] = s.phenomenon;
    js["item_count"] = s.item_count;
    ordered_json preds = ordered_json::array();
    for (const auto& p : s.predictions) {
      ordered_json jp;
      jp["formula"] = p.formula;
      jp["summary"] = TallyToJson(p.tally);
      ordered_json groups = ordered_json::object();
      for (const auto& [key, values] : p.groups) {
        ordered_json g = ordered_json::object();
        for (const auto& [value, tally] : values) g[value] = TallyToJson(tally);
        groups[key] = std::move(g);
      }
      jp["groups"] = std::move(groups);
      if (p.grid) {
        ordered_json grid;
        grid["row_key"] = p.grid->row_key;
        grid["column_key"] = p.grid->column_key;
        ordered_json cells = ordered_json::object();
        for (const auto& [row, cols] : p.grid->cells) {
          ordered_json jr = ordered_json::object();
          for (const auto& [col, tally] : cols) jr[col] = TallyToJson(tally);
          cells[row] = std::move(jr);
        }
        grid["cells"] = std::move(cells);
        jp["grid"] = std::move(grid);
      }
      preds.push_back(std::move(jp));
    }
    js["predictions"] = std::move(preds);
    ordered_json items = ordered_json::array();
    for (const auto& item : s.items) {
      ordered_json ji;
      ji["item_number"] = item.item_number;
      ordered_json tags = ordered_json::object();
      for (const auto& [k, v] : item.tags) tags[k] = v;
      ji["tags"] = std::move(tags);
      ordered_json verdicts = ordered_json::array();
      for (Verdict v : item.verdicts) verdicts.push_back(VerdictName(v));
      ji["verdicts"] = std::move(verdicts);
      ordered_json conds = ordered_json::object();
      for (const auto& [name, regions] : item.regions) {
        ordered_json jr = ordered_json::object();
        for (const auto& [region, stats] : regions) {
          ordered_json st;
          st["sum_bits"] = stats.sum_bits;
          st["token_count"] = stats.token_count;
          if (stats.token_count > 0) {
            st["mean_bits"] =
                stats.sum_bits / static_cast<double>(stats.token_count);
          } else {
            st["mean_bits"] = nullptr;
          }
          jr[std::to_string(region)] = std::move(st);
        }
        conds[name] = std::move(jr);
      }
      ji["conditions"] = std::move(conds);
      items.push_back(std::move(ji));
    }
    js["items"] = std::move(items);
    suites.push_back(std::move(js));
  }
  root["suites"] = std::move(suites);
  return root;
}

std::string SerializeResults(const RunResults& results) {
  return ResultsToJson(results).dump(2) + "\n";
}

RunResults ParseResults(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw MalformedJson(std::string("results: ") + e.what());
  }
  RunResults out;
  try {
    const int version = root.at("schema_version").get<int>();
    if (version > kResultsSchemaVersion) {
      throw EvaluationError("results schema_version " + std::to_string(version) +
                            " is newer than supported version " +
                            std::to_string(kResultsSchemaVersion));
    }
    const json& b = root.at("backend");
    out.backend.backend_name = b.at("backend_name").get<std::string>();
    out.backend.supports_separator = b.at("supports_separator").get<bool>();
    out.backend.separator_literal = b.value("separator_literal", "[SEP]");
    out.backend.token_marker = b.value("token_marker", "");
    out.backend.first_token_context = b.value("first_token_context", "");
    for (const json& js : root.at("suites")) {
      SuiteReport s;
      s.suite_name = js.at("name").get<std::string>();
      s.phenomenon = js.at("phenomenon").get<std::string>();
      s.item_count = js.at("item_count").get<std::size_t>();
      for (const json& jp : js.at("predictions")) {
        PredictionReport p;
        p.formula = jp.at("formula").get<std::string>();
        p.tally = TallyFromJson(jp.at("summary"));
        for (const auto& [key, values] : jp.at("groups").items()) {
          for (const auto& [value, tally] : values.items()) {
            p.groups[key][value] = TallyFromJson(tally);
          }
        }
        if (jp.contains("grid")) {
          const json& g = jp.at("grid");
          GridBreakdown grid;
          grid.row_key = g.at("row_key").get<std::string>();
          grid.column_key = g.at("column_key").get<std::string>();
          for (const auto& [row, cols] : g.at("cells").items()) {
            for (const auto& [col, tally] : cols.items()) {
              grid.cells[row][col] = TallyFromJson(tally);
            }
          }
          p.grid = std::move(grid);
        }
        s.predictions.push_back(std::move(p));
      }
      for (const json& ji : js.at("items")) {
        ItemResult item;
        item.item_number = ji.at("item_number").get<int>();
        item.tags = ji.at("tags").get<std::map<std::string, std::string>>();
        for (const json& v : ji.at("verdicts")) {
          item.verdicts.push_back(VerdictFromName(v.get<std::string>()));
        }
        for (const auto& [name, regions] : ji.at("conditions").items()) {
          auto& dst = item.regions[name];
          for (const auto& [region, st] : regions.items()) {
            dst[std::stoi(region)] =
                RegionStats{st.at("sum_bits").get<double>(),
                            st.at("token_count").get<std::size_t>()};
          }
        }
        s.items.push_back(std::move(item));
      }
      out.suites.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw EvaluationError(std::string("results document: ") + e.what());
  }
  return out;
}

// ---- markdown --------------------------------------------------------------

namespace {

std::string FormatAccuracy(const std::optional<double>& acc) {
  if (!acc) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", *acc);
  return buf;
}

// A table column: a label plus how to pull a tally out of one run.
struct Column {
  std::string label;
  std::function<std::optional<Tally>(const RunResults&)> extract;
};

std::string RenderTable(const std::string& title,
                        std::span<const RunResults> runs,
                        const std::vector<Column>& columns) {
  std::string out = "## " + title + "\n\n| model |";
  for (const auto& c : columns) out += " " + c.label + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < columns.size(); ++i) out += "---|";
  out += "\n";
  for (const auto& run : runs) {
    out += "| " + run.backend.backend_name + " |";
    for (const auto& c : columns) {
      const auto tally = c.extract(run);
      out += " " + (tally ? FormatAccuracy(tally->accuracy()) : "--") + " |";
    }
    out += "\n";
  }
  out += "| #items |";
  for (const auto& c : columns) {
    std::string count = "--";
    for (const auto& run : runs) {
      if (auto tally = c.extract(run)) {
        count = std::to_string(tally->total());
        break;
      }
    }
    out += " " + count + " |";
  }
  out += "\n\n";
  return out;
}

const SuiteReport* FindSuite(const RunResults& run, const std::string& name) {
  for (const auto& s : run.suites) {
    if (s.suite_name == name) return &s;
  }
  return nullptr;
}

// Suite names (first-seen order across runs) whose phenomenon passes `pred`.
std::vector<std::string> SuiteNames(
    std::span<const RunResults> runs,
    const std::function<bool(const std::string&)>& pred) {
  std::vector<std::string> names;
  for (const auto& run : runs) {
    for (const auto& s : run.suites) {
      if (pred(s.phenomenon) &&
          std::find(names.begin(), names.end(), s.suite_name) == names.end()) {
        names.push_back(s.suite_name);
      }
    }
  }
  return names;
}

// Orders `values` with the preferred ones first, the rest alphabetically.
std::vector<std::string> PreferredOrder(std::vector<std::string> values,
                                        const std::vector<std::string>& pref) {
  auto rank = [&](const std::string& v) {
    auto it = std::find(pref.begin(), pref.end(), v);
    return static_cast<std::size_t>(it - pref.begin());
  };
  std::stable_sort(values.begin(), values.end(),
                   [&](const std::string& a, const std::string& b) {
                     const auto ra = rank(a), rb = rank(b);
                     if (ra != rb) return ra < rb;
                     return a < b;
                   });
  return values;
}

Column PredictionColumn(std::string label, std::string suite,
                        std::size_t index) {
  return Column{std::move(label),
                [suite = std::move(suite), index](const RunResults& run)
                    -> std::optional<Tally> {
                  const SuiteReport* s = FindSuite(run, suite);
                  if (!s || index >= s->predictions.size()) return std::nullopt;
                  return s->predictions[index].tally;
                }};
}

bool IsFullWinograd(const std::string& formula) {
  return formula.find('*') != std::string::npos;
}

std::string RenderGrid(const RunResults& run, const SuiteReport& suite,
                       const GridBreakdown& grid) {
  static const std::vector<std::string> kConnectives = {
      "although", "as", "however", "since", "though", "while", "yet"};
  std::vector<std::string> rows;
  std::vector<std::string> cols = kConnectives;
  for (const auto& [row, cells] : grid.cells) {
    rows.push_back(row);
    for (const auto& [col, tally] : cells) {
      if (std::find(cols.begin(), cols.end(), col) == cols.end()) {
        cols.push_back(col);
      }
    }
  }
  std::string out = "### " + run.backend.backend_name + " (" +
                    suite.suite_name + ")\n\n| " + grid.row_key + " |";
  for (const auto& c : cols) out += " " + c + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < cols.size(); ++i) out += "---|";
  out += "\n";
  for (const auto& row : rows) {
    out += "| " + row + " |";
    const auto& cells = grid.cells.at(row);
    for (const auto& c : cols) {
      auto it = cells.find(c);
      out += " " +
             (it == cells.end() ? std::string("--")
                                : FormatAccuracy(it->second.accuracy())) +
             " |";
    }
    out += "\n";
  }
  out += "\n";
  return out;
}

}  // namespace

std::string RenderMarkdown(std::span<const RunResults> runs) {
  std::string out;
  bool any_suite = false;
  for (const auto& run : runs) any_suite = any_suite || !run.suites.empty();
  if (!any_suite) throw EvaluationError("no results to render");

  // Shuffling.
  {
    auto names = PreferredOrder(
        SuiteNames(runs,
                   [](const std::string& p) {
                     return p == "shuffle_all" || p == "shuffle_context";
                   }),
        {"N_all", "N_context", "D_all", "D_context"});
    std::vector<Column> cols;
    for (const auto& n : names) cols.push_back(PredictionColumn(n, n, 0));
    if (!cols.empty()) out += RenderTable("Sentence order", runs, cols);
  }

  // Story cloze and Winograd.
  {
    std::vector<Column> cols;
    for (const auto& n : SuiteNames(runs, [](const std::string& p) {
           return p == "story_cloze";
         })) {
      cols.push_back(PredictionColumn(n, n, 0));
    }
    for (const auto& n : SuiteNames(runs, [](const std::string& p) {
           return p == "winograd_full" || p == "winograd_partial";
         })) {
      for (const auto& run : runs) {
        const SuiteReport* s = FindSuite(run, n);
        if (!s) continue;
        for (std::size_t i = 0; i < s->predictions.size(); ++i) {
          const char* kind =
              IsFullWinograd(s->predictions[i].formula) ? "full" : "partial";
          cols.push_back(PredictionColumn(n + " " + kind, n, i));
        }
        break;
      }
    }
    if (!cols.empty()) out += RenderTable("Story Cloze and Winograd", runs, cols);
  }

  // Coreference by genre.
  {
    const auto names = SuiteNames(
        runs, [](const std::string& p) { return p == "coreference"; });
    std::vector<Column> cols;
    for (const auto& n : names) {
      std::vector<std::string> genres;
      for (const auto& run : runs) {
        const SuiteReport* s = FindSuite(run, n);
        if (!s || s->predictions.empty()) continue;
        auto it = s->predictions[0].groups.find("genre");
        if (it == s->predictions[0].groups.end()) continue;
        for (const auto& [g, t] : it->second) {
          if (std::find(genres.begin(), genres.end(), g) == genres.end()) {
            genres.push_back(g);
          }
        }
      }
      genres = PreferredOrder(genres, {"wsj", "vpc", "dialogue", "fiction"});
      if (genres.empty()) {
        cols.push_back(PredictionColumn(n, n, 0));
        continue;
      }
      for (const auto& g : genres) {
        const std::string label = names.size() == 1 ? g : n + ":" + g;
        cols.push_back(Column{label, [n, g](const RunResults& run)
                                         -> std::optional<Tally> {
                                const SuiteReport* s = FindSuite(run, n);
                                if (!s || s->predictions.empty()) return {};
                                const auto& groups = s->predictions[0].groups;
                                auto it = groups.find("genre");
                                if (it == groups.end()) return {};
                                auto jt = it->second.find(g);
                                if (jt == it->second.end()) return {};
                                return jt->second;
                              }});
      }
    }
    if (!cols.empty()) out += RenderTable("Entity re-mention", runs, cols);
  }

  // Connectives: one sense x substitute grid per backend.
  {
    std::string grids;
    for (const auto& run : runs) {
      for (const auto& s : run.suites) {
        if (s.phenomenon != "connectives") continue;
        for (const auto& p : s.predictions) {
          if (p.grid) grids += RenderGrid(run, s, *p.grid);
        }
      }
    }
    if (!grids.empty()) out += "## Explicit connectives\n\n" + grids;
  }

  // Speaker commitment.
  {
    std::vector<Column> cols;
    for (const auto& n : SuiteNames(runs, [](const std::string& p) {
           return p == "speaker_commitment";
         })) {
      cols.push_back(PredictionColumn(n, n, 0));
    }
    if (!cols.empty()) out += RenderTable("Speaker commitment", runs, cols);
  }

  // Everything else, one column per prediction.
  {
    std::vector<Column> cols;
    for (const auto& n : SuiteNames(runs, [](const std::string& p) {
           return p == "custom";
         })) {
      for (const auto& run : runs) {
        const SuiteReport* s = FindSuite(run, n);
        if (!s) continue;
        for (std::size_t i = 0; i < s->predictions.size(); ++i) {
          const std::string label =
              s->predictions.size() == 1 ? n : n + "#" + std::to_string(i + 1);
          cols.push_back(PredictionColumn(label, n, i));
        }
        break;
      }
    }
    if (!cols.empty()) out += RenderTable("Other suites", runs, cols);
  }
  return out;
}

}  // namespace cohgym
