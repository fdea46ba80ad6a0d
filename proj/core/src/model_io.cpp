#include "comtdp/model_io.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "comtdp/numeric.hpp"

namespace comtdp {

namespace {

constexpr int kWildcard = -1;
constexpr int kNullActionToken = -2;

struct Line {
  int number;
  std::vector<std::string> tokens;
};

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ModelParseError("model file, line " + std::to_string(line) + ": " + msg);
}

std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> out;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    Line line{number, {}};
    std::string tok;
    while (ls >> tok) line.tokens.push_back(tok);
    if (!line.tokens.empty()) out.push_back(std::move(line));
  }
  return out;
}

// A column is either a state feature, an agent's (previous) action, or an
// agent's message.
struct Column {
  enum Kind { kFeature, kAction, kMessage } kind;
  int index;  // feature index or agent index
};

struct Row {
  int line;
  std::vector<int> inputs;   // value index, kWildcard, or kNullActionToken
  std::vector<int> outputs;  // concrete indices
  double value = 0.0;        // probability or reward
};

struct Table {
  std::vector<Column> columns;
  std::vector<Row> rows;
  // Concrete rows bucketed by their input tuple; wildcard rows scanned.
  std::unordered_map<std::string, std::vector<std::size_t>> exactBuckets;
  std::vector<std::size_t> wildcardRows;

  void finalize() {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      bool concrete = std::none_of(rows[r].inputs.begin(), rows[r].inputs.end(),
                                   [](int v) { return v == kWildcard; });
      if (concrete) {
        exactBuckets[keyOf(rows[r].inputs)].push_back(r);
      } else {
        wildcardRows.push_back(r);
      }
    }
  }

  static std::string keyOf(const std::vector<int>& inputs) {
    std::string k;
    for (int v : inputs) {
      k += std::to_string(v);
      k += ',';
    }
    return k;
  }

  /// Calls emit once per distinct output tuple applicable to the query,
  /// with the earliest matching row deciding the value (first match wins).
  template <typename Emit>
  void match(const std::vector<int>& query, Emit&& emit) const {
    std::map<std::vector<int>, std::size_t> best;  // outputs -> earliest row
    auto consider = [&](std::size_t r) {
      const Row& row = rows[r];
      for (std::size_t c = 0; c < query.size(); ++c) {
        int want = row.inputs[c];
        if (want == kWildcard) continue;
        if (want != query[c]) return;
      }
      auto [it, inserted] = best.emplace(row.outputs, r);
      if (!inserted && r < it->second) it->second = r;
    };
    auto bucket = exactBuckets.find(keyOf(query));
    if (bucket != exactBuckets.end()) {
      for (std::size_t r : bucket->second) consider(r);
    }
    for (std::size_t r : wildcardRows) consider(r);
    for (const auto& [outputs, r] : best) emit(rows[r].outputs, rows[r].value, r);
  }
};

struct Sections {
  std::map<std::string, std::vector<Line>> byName;
};

}  // namespace

Model parseModel(const std::string& text) {
  auto lines = tokenize(text);

  Sections sections;
  std::string current;
  for (auto& line : lines) {
    const std::string& head = line.tokens.front();
    if (head.size() >= 2 && head.front() == '[' && head.back() == ']') {
      current = head.substr(1, head.size() - 2);
      if (line.tokens.size() != 1) fail(line.number, "unexpected tokens after section header");
      if (sections.byName.count(current)) fail(line.number, "duplicate section " + current);
      sections.byName[current];
      continue;
    }
    if (current.empty()) fail(line.number, "content before any [section]");
    sections.byName[current].push_back(std::move(line));
  }

  auto need = [&](const std::string& name) -> std::vector<Line>& {
    auto it = sections.byName.find(name);
    if (it == sections.byName.end()) throw ModelParseError("missing [" + name + "] section");
    return it->second;
  };

  Model m;

  // [features]
  for (auto& line : need("features")) {
    if (line.tokens.size() < 3 || line.tokens[1] != "=") {
      fail(line.number, "expected: <feature> = <value>...");
    }
    FeatureDef f{line.tokens[0], {line.tokens.begin() + 2, line.tokens.end()}};
    for (auto& v : f.values) {
      if (v == "." || v == "-") fail(line.number, "'.' and '-' are reserved tokens");
    }
    m.features.push_back(std::move(f));
  }
  if (m.features.empty()) throw ModelParseError("no features defined");

  // [agents]
  for (auto& line : need("agents")) {
    for (auto& name : line.tokens) m.agents.push_back(AgentDef{name, {}, {}, {}});
  }
  if (m.agents.empty()) throw ModelParseError("no agents defined");

  auto agentLists = [&](const std::string& section, auto member, bool allowEmpty) {
    for (auto& line : need(section)) {
      if (line.tokens.size() < 2 || line.tokens[1] != "=") {
        fail(line.number, "expected: <agent> = <symbol>...");
      }
      if (line.tokens.size() == 2 && !allowEmpty) {
        fail(line.number, "empty list not allowed in [" + section + "]");
      }
      AgentId i = m.agentIndex(line.tokens[0]);
      (m.agents[i].*member) = {line.tokens.begin() + 2, line.tokens.end()};
      for (auto& v : m.agents[i].*member) {
        if (v == "." || v == "-") fail(line.number, "'.' and '-' are reserved tokens");
      }
    }
  };
  agentLists("actions", &AgentDef::actions, false);
  agentLists("messages", &AgentDef::messages, true);
  agentLists("observations", &AgentDef::observations, false);
  for (auto& a : m.agents) {
    if (a.actions.empty()) throw ModelParseError("agent " + a.name + " has no actions");
    if (a.observations.empty()) {
      throw ModelParseError("agent " + a.name + " has no observations");
    }
  }

  // Column parsing helper.
  auto parseColumns = [&](const Line& line, std::size_t from, bool allowMessage) {
    std::vector<Column> cols;
    for (std::size_t k = from; k < line.tokens.size(); ++k) {
      const std::string& tok = line.tokens[k];
      if (tok.rfind("action:", 0) == 0) {
        cols.push_back({Column::kAction, m.agentIndex(tok.substr(7))});
      } else if (tok.rfind("message:", 0) == 0) {
        if (!allowMessage) fail(line.number, "message columns not allowed here");
        cols.push_back({Column::kMessage, m.agentIndex(tok.substr(8))});
      } else {
        cols.push_back({Column::kFeature, m.featureIndex(tok)});
      }
    }
    return cols;
  };

  auto parseCell = [&](const Line& line, const Column& col, const std::string& tok) -> int {
    if (tok == ".") return kWildcard;
    switch (col.kind) {
      case Column::kFeature:
        return m.featureValueIndex(col.index, tok);
      case Column::kAction:
        if (tok == "-") return kNullActionToken;
        return m.actionIndex(col.index, tok);
      case Column::kMessage:
        return m.messageIndex(col.index, tok);
    }
    fail(line.number, "bad cell");
  };

  auto parseDouble = [&](const Line& line, const std::string& tok) {
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == nullptr || *end != '\0') fail(line.number, "bad number: " + tok);
    return v;
  };

  // Generic table reader. outputsFor = number of output tokens before the
  // trailing value; pass 0 for reward tables (output is the value itself).
  struct ParsedTable {
    std::string target;  // feature name, agent name, or "joint"
    Table table;
  };
  auto readTables = [&](const std::string& section, bool rewardTable, bool allowMessage,
                        const std::function<int(const std::string&)>& outputCount,
                        const std::function<int(const std::string&, const Line&,
                                                const std::string&, int)>& parseOutput)
      -> std::vector<ParsedTable> {
    std::vector<ParsedTable> tables;
    for (auto& line : need(section)) {
      if (line.tokens[0] == "table" || line.tokens[0] == "given") {
        ParsedTable t;
        std::size_t colStart;
        if (line.tokens[0] == "given") {  // single anonymous table
          t.target = "";
          colStart = 1;
        } else {
          if (line.tokens.size() < 3 || line.tokens[2] != "given") {
            fail(line.number, "expected: table <target> given <columns>...");
          }
          t.target = line.tokens[1];
          colStart = 3;
        }
        t.table.columns = parseColumns(line, colStart, allowMessage);
        tables.push_back(std::move(t));
        continue;
      }
      if (tables.empty()) fail(line.number, "row before any table header");
      ParsedTable& t = tables.back();
      auto arrow = std::find(line.tokens.begin(), line.tokens.end(), "->");
      if (arrow == line.tokens.end()) fail(line.number, "missing '->'");
      std::size_t nIn = arrow - line.tokens.begin();
      if (nIn != t.table.columns.size()) {
        fail(line.number, "expected " + std::to_string(t.table.columns.size()) +
                              " input cells, got " + std::to_string(nIn));
      }
      Row row;
      row.line = line.number;
      for (std::size_t c = 0; c < nIn; ++c) {
        row.inputs.push_back(parseCell(line, t.table.columns[c], line.tokens[c]));
      }
      std::size_t pos = nIn + 1;
      int nOut = rewardTable ? 0 : outputCount(t.target);
      if (line.tokens.size() != pos + nOut + 1) {
        fail(line.number, "expected " + std::to_string(nOut) +
                              " output cells plus one value");
      }
      for (int k = 0; k < nOut; ++k) {
        row.outputs.push_back(parseOutput(t.target, line, line.tokens[pos], k));
        ++pos;
      }
      row.value = parseDouble(line, line.tokens[pos]);
      t.table.rows.push_back(std::move(row));
    }
    for (auto& t : tables) t.table.finalize();
    return tables;
  };

  const StateId nS = m.stateCount();
  const JointActionId nA = m.jointActionCount();
  const JointMessageId nM = m.jointMessageCount();

  // ---- transition -----------------------------------------------------
  {
    auto outputCount = [&](const std::string& target) {
      return target == "joint" ? static_cast<int>(m.features.size()) : 1;
    };
    auto parseOutput = [&](const std::string& target, const Line& line,
                           const std::string& tok, int slot) -> int {
      if (tok == ".") fail(line.number, "outputs must be concrete");
      if (target == "joint") return m.featureValueIndex(slot, tok);
      return m.featureValueIndex(m.featureIndex(target), tok);
    };
    auto tables = readTables("transition", false, false, outputCount, parseOutput);

    bool joint = !tables.empty() && tables.front().target == "joint";
    if (joint && tables.size() != 1) {
      throw ModelParseError("transition: joint table cannot be mixed with feature tables");
    }
    if (!joint) {
      std::vector<const Table*> byFeature(m.features.size(), nullptr);
      for (auto& t : tables) {
        byFeature[m.featureIndex(t.target)] = &t.table;
      }
      for (std::size_t f = 0; f < m.features.size(); ++f) {
        if (!byFeature[f]) {
          throw ModelParseError("transition: no table for feature " + m.features[f].name);
        }
      }
      m.transition.resize(static_cast<std::size_t>(nS) * nA);
      for (StateId s = 0; s < nS; ++s) {
        auto stateVals = m.unpackState(s);
        for (JointActionId a = 0; a < nA; ++a) {
          auto actVals = m.unpackAction(a);
          // Per-feature supports, then their product.
          std::vector<std::vector<std::pair<int, double>>> parts(m.features.size());
          for (std::size_t f = 0; f < m.features.size(); ++f) {
            std::vector<int> query;
            for (const auto& col : byFeature[f]->columns) {
              query.push_back(col.kind == Column::kFeature ? stateVals[col.index]
                                                           : actVals[col.index]);
            }
            byFeature[f]->match(query, [&](const std::vector<int>& outs, double v,
                                           std::size_t) {
              if (v > 0.0) parts[f].push_back({outs[0], v});
            });
          }
          std::vector<std::pair<std::vector<int>, double>> combos{{{}, 1.0}};
          for (std::size_t f = 0; f < m.features.size(); ++f) {
            std::vector<std::pair<std::vector<int>, double>> grown;
            for (auto& [vals, p] : combos) {
              for (auto& [v, q] : parts[f]) {
                auto nv = vals;
                nv.push_back(v);
                grown.push_back({std::move(nv), p * q});
              }
            }
            combos = std::move(grown);
          }
          auto& row = m.transition[static_cast<std::size_t>(s) * nA + a];
          for (auto& [vals, p] : combos) row.push_back({m.packState(vals), p});
        }
      }
    } else {
      const Table& t = tables.front().table;
      m.transition.resize(static_cast<std::size_t>(nS) * nA);
      for (StateId s = 0; s < nS; ++s) {
        auto stateVals = m.unpackState(s);
        for (JointActionId a = 0; a < nA; ++a) {
          auto actVals = m.unpackAction(a);
          std::vector<int> query;
          for (const auto& col : t.columns) {
            query.push_back(col.kind == Column::kFeature ? stateVals[col.index]
                                                         : actVals[col.index]);
          }
          auto& row = m.transition[static_cast<std::size_t>(s) * nA + a];
          t.match(query, [&](const std::vector<int>& outs, double v, std::size_t) {
            if (v > 0.0) row.push_back({m.packState(outs), v});
          });
        }
      }
    }
  }

  // ---- observation ----------------------------------------------------
  {
    auto outputCount = [&](const std::string& target) {
      return target == "joint" ? m.agentCount() : 1;
    };
    auto parseOutput = [&](const std::string& target, const Line& line,
                           const std::string& tok, int slot) -> int {
      if (tok == ".") fail(line.number, "outputs must be concrete");
      if (target == "joint") return m.observationIndex(slot, tok);
      return m.observationIndex(m.agentIndex(target), tok);
    };
    auto tables = readTables("observation", false, false, outputCount, parseOutput);

    bool joint = !tables.empty() && tables.front().target == "joint";
    auto queryFor = [&](const Table& t, StateId s, int key) {
      auto stateVals = m.unpackState(s);
      std::optional<std::vector<ActionId>> actVals;
      if (key > 0) actVals = m.unpackAction(key - 1);
      std::vector<int> query;
      for (const auto& col : t.columns) {
        if (col.kind == Column::kFeature) {
          query.push_back(stateVals[col.index]);
        } else {
          query.push_back(actVals ? (*actVals)[col.index] : kNullActionToken);
        }
      }
      return query;
    };

    if (joint) {
      if (tables.size() != 1) {
        throw ModelParseError("observation: joint table cannot be mixed with agent tables");
      }
      const Table& t = tables.front().table;
      m.obsJoint.resize(static_cast<std::size_t>(nS) * (nA + 1));
      for (StateId s = 0; s < nS; ++s) {
        for (int key = 0; key <= nA; ++key) {
          auto query = queryFor(t, s, key);
          auto& row = m.obsJoint[static_cast<std::size_t>(s) * (nA + 1) + key];
          t.match(query, [&](const std::vector<int>& outs, double v, std::size_t) {
            if (v > 0.0) {
              row.push_back(JointObsEntry{std::vector<ObsId>(outs.begin(), outs.end()), v});
            }
          });
        }
      }
    } else {
      std::vector<const Table*> byAgent(m.agentCount(), nullptr);
      for (auto& t : tables) byAgent[m.agentIndex(t.target)] = &t.table;
      for (AgentId i = 0; i < m.agentCount(); ++i) {
        if (!byAgent[i]) {
          throw ModelParseError("observation: no table for agent " + m.agents[i].name);
        }
      }
      m.obsFactored.assign(m.agentCount(), {});
      for (AgentId i = 0; i < m.agentCount(); ++i) {
        m.obsFactored[i].resize(static_cast<std::size_t>(nS) * (nA + 1));
        for (StateId s = 0; s < nS; ++s) {
          for (int key = 0; key <= nA; ++key) {
            auto query = queryFor(*byAgent[i], s, key);
            auto& row = m.obsFactored[i][static_cast<std::size_t>(s) * (nA + 1) + key];
            byAgent[i]->match(query, [&](const std::vector<int>& outs, double v,
                                         std::size_t) {
              if (v > 0.0) row.push_back({static_cast<ObsId>(outs[0]), v});
            });
          }
        }
      }
    }
  }

  // ---- rewards ----------------------------------------------------------
  {
    auto zero = [](const std::string&) { return 0; };
    auto noOut = [&](const std::string&, const Line& line, const std::string&, int) -> int {
      fail(line.number, "reward rows have no outputs");
    };
    auto tables = readTables("reward_domain", true, false, zero, noOut);
    if (tables.size() != 1) throw ModelParseError("reward_domain: expected one 'given' table");
    const Table& t = tables.front().table;
    m.rewardDomain.assign(static_cast<std::size_t>(nS) * nA, 0.0);
    for (StateId s = 0; s < nS; ++s) {
      auto stateVals = m.unpackState(s);
      for (JointActionId a = 0; a < nA; ++a) {
        auto actVals = m.unpackAction(a);
        std::vector<int> query;
        for (const auto& col : t.columns) {
          query.push_back(col.kind == Column::kFeature ? stateVals[col.index]
                                                       : actVals[col.index]);
        }
        double best = 0.0;
        std::size_t bestRow = SIZE_MAX;
        t.match(query, [&](const std::vector<int>&, double v, std::size_t r) {
          if (r < bestRow) {
            bestRow = r;
            best = v;
          }
        });
        m.rewardDomain[static_cast<std::size_t>(s) * nA + a] = best;
      }
    }
  }
  {
    auto zero = [](const std::string&) { return 0; };
    auto noOut = [&](const std::string&, const Line& line, const std::string&, int) -> int {
      fail(line.number, "reward rows have no outputs");
    };
    auto tables = readTables("reward_comm", true, true, zero, noOut);
    if (tables.size() != 1) throw ModelParseError("reward_comm: expected one 'given' table");
    const Table& t = tables.front().table;
    m.rewardComm.assign(static_cast<std::size_t>(nS) * nM, 0.0);
    for (StateId s = 0; s < nS; ++s) {
      auto stateVals = m.unpackState(s);
      for (JointMessageId mm = 0; mm < nM; ++mm) {
        auto msgVals = m.unpackMessage(mm);
        std::vector<int> query;
        for (const auto& col : t.columns) {
          if (col.kind == Column::kFeature) {
            query.push_back(stateVals[col.index]);
          } else {
            query.push_back(msgVals[col.index]);
          }
        }
        double best = 0.0;
        std::size_t bestRow = SIZE_MAX;
        t.match(query, [&](const std::vector<int>&, double v, std::size_t r) {
          if (r < bestRow) {
            bestRow = r;
            best = v;
          }
        });
        m.rewardComm[static_cast<std::size_t>(s) * nM + mm] = best;
      }
    }
  }

  // ---- initial ------------------------------------------------------------
  {
    std::vector<std::vector<std::pair<int, double>>> perFeature(m.features.size());
    std::vector<std::pair<StateId, double>> jointRows;
    bool haveFeatureRows = false, haveJointRows = false;
    for (auto& line : need("initial")) {
      if (line.tokens[0] == "feature") {
        if (line.tokens.size() != 4) fail(line.number, "expected: feature <name> <value> <p>");
        haveFeatureRows = true;
        int f = m.featureIndex(line.tokens[1]);
        perFeature[f].push_back(
            {m.featureValueIndex(f, line.tokens[2]), parseDouble(line, line.tokens[3])});
      } else if (line.tokens[0] == "joint") {
        if (line.tokens.size() != m.features.size() + 2) {
          fail(line.number, "expected: joint <value per feature> <p>");
        }
        haveJointRows = true;
        std::vector<int> vals;
        for (std::size_t f = 0; f < m.features.size(); ++f) {
          vals.push_back(m.featureValueIndex(static_cast<int>(f), line.tokens[1 + f]));
        }
        jointRows.push_back({m.packState(vals), parseDouble(line, line.tokens.back())});
      } else {
        fail(line.number, "expected 'feature' or 'joint' row");
      }
    }
    if (haveFeatureRows && haveJointRows) {
      throw ModelParseError("initial: cannot mix feature and joint rows");
    }
    if (haveJointRows) {
      m.initial = std::move(jointRows);
    } else {
      for (std::size_t f = 0; f < m.features.size(); ++f) {
        if (perFeature[f].empty()) {
          throw ModelParseError("initial: no distribution for feature " + m.features[f].name);
        }
      }
      std::vector<std::pair<std::vector<int>, double>> combos{{{}, 1.0}};
      for (std::size_t f = 0; f < m.features.size(); ++f) {
        std::vector<std::pair<std::vector<int>, double>> grown;
        for (auto& [vals, p] : combos) {
          for (auto& [v, q] : perFeature[f]) {
            if (q <= 0.0) continue;
            auto nv = vals;
            nv.push_back(v);
            grown.push_back({std::move(nv), p * q});
          }
        }
        combos = std::move(grown);
      }
      for (auto& [vals, p] : combos) m.initial.push_back({m.packState(vals), p});
      std::sort(m.initial.begin(), m.initial.end());
    }
  }

  // ---- horizon --------------------------------------------------------
  {
    auto& lines2 = need("horizon");
    if (lines2.size() != 1 || lines2[0].tokens.size() != 1) {
      throw ModelParseError("horizon: expected a single integer");
    }
    m.horizon = static_cast<int>(parseDouble(lines2[0], lines2[0].tokens[0]));
  }

  return m;
}

Model loadModel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelParseError("cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parseModel(ss.str());
}

std::string serializeModel(const Model& m) {
  std::ostringstream out;
  out << "[features]\n";
  for (const auto& f : m.features) {
    out << f.name << " =";
    for (const auto& v : f.values) out << " " << v;
    out << "\n";
  }
  out << "\n[agents]\n";
  for (const auto& a : m.agents) out << a.name << " ";
  out << "\n";
  auto lists = [&](const char* name, auto member) {
    out << "\n[" << name << "]\n";
    for (const auto& a : m.agents) {
      out << a.name << " =";
      for (const auto& v : a.*member) out << " " << v;
      out << "\n";
    }
  };
  lists("actions", &AgentDef::actions);
  lists("messages", &AgentDef::messages);
  lists("observations", &AgentDef::observations);

  const StateId nS = m.stateCount();
  const JointActionId nA = m.jointActionCount();
  const JointMessageId nM = m.jointMessageCount();

  auto inputCells = [&](StateId s, std::optional<JointActionId> a) {
    std::string cells;
    auto stateVals = m.unpackState(s);
    for (std::size_t f = 0; f < m.features.size(); ++f) {
      cells += m.features[f].values[stateVals[f]];
      cells += " ";
    }
    if (a) {
      auto actVals = m.unpackAction(*a);
      for (std::size_t i = 0; i < m.agents.size(); ++i) {
        cells += m.agents[i].actions[actVals[i]];
        cells += " ";
      }
    } else {
      for (std::size_t i = 0; i < m.agents.size(); ++i) cells += "- ";
    }
    return cells;
  };
  auto allColumns = [&]() {
    std::string cols;
    for (const auto& f : m.features) cols += " " + f.name;
    for (const auto& a : m.agents) cols += " action:" + a.name;
    return cols;
  };

  out << "\n[transition]\ntable joint given" << allColumns() << "\n";
  for (StateId s = 0; s < nS; ++s) {
    for (JointActionId a = 0; a < nA; ++a) {
      for (const auto& [s2, p] : m.transition[static_cast<std::size_t>(s) * nA + a]) {
        out << inputCells(s, a) << "->";
        auto vals = m.unpackState(s2);
        for (std::size_t f = 0; f < m.features.size(); ++f) {
          out << " " << m.features[f].values[vals[f]];
        }
        out << " " << formatValue(p) << "\n";
      }
    }
  }

  out << "\n[observation]\n";
  if (m.factoredObservations()) {
    for (AgentId i = 0; i < m.agentCount(); ++i) {
      out << "table " << m.agents[i].name << " given" << allColumns() << "\n";
      for (StateId s = 0; s < nS; ++s) {
        for (int key = 0; key <= nA; ++key) {
          std::optional<JointActionId> prev =
              key == 0 ? std::nullopt : std::optional<JointActionId>(key - 1);
          for (const auto& [o, p] : m.obsFactored[i][m.obsKey(s, prev)]) {
            if (p <= 0.0) continue;
            out << inputCells(s, prev) << "-> " << m.agents[i].observations[o] << " "
                << formatValue(p) << "\n";
          }
        }
      }
    }
  } else {
    out << "table joint given" << allColumns() << "\n";
    for (StateId s = 0; s < nS; ++s) {
      for (int key = 0; key <= nA; ++key) {
        std::optional<JointActionId> prev =
            key == 0 ? std::nullopt : std::optional<JointActionId>(key - 1);
        for (const auto& e : m.obsJoint[m.obsKey(s, prev)]) {
          if (e.p <= 0.0) continue;
          out << inputCells(s, prev) << "->";
          for (AgentId i = 0; i < m.agentCount(); ++i) {
            out << " " << m.agents[i].observations[e.obs[i]];
          }
          out << " " << formatValue(e.p) << "\n";
        }
      }
    }
  }

  out << "\n[reward_domain]\ngiven" << allColumns() << "\n";
  for (StateId s = 0; s < nS; ++s) {
    for (JointActionId a = 0; a < nA; ++a) {
      double r = m.rewardDomain[static_cast<std::size_t>(s) * nA + a];
      if (r != 0.0) out << inputCells(s, a) << "-> " << formatValue(r) << "\n";
    }
  }

  out << "\n[reward_comm]\ngiven";
  for (const auto& f : m.features) out << " " << f.name;
  for (const auto& a : m.agents) out << " message:" << a.name;
  out << "\n";
  for (StateId s = 0; s < nS; ++s) {
    for (JointMessageId mm = 0; mm < nM; ++mm) {
      double r = m.rewardComm[static_cast<std::size_t>(s) * nM + mm];
      if (r == 0.0) continue;
      auto stateVals = m.unpackState(s);
      for (std::size_t f = 0; f < m.features.size(); ++f) {
        out << m.features[f].values[stateVals[f]] << " ";
      }
      auto msgVals = m.unpackMessage(mm);
      for (AgentId i = 0; i < m.agentCount(); ++i) {
        out << (msgVals[i] == kNullMessage ? "null" : m.agents[i].messages[msgVals[i] - 1])
            << " ";
      }
      out << "-> " << formatValue(r) << "\n";
    }
  }

  out << "\n[initial]\n";
  for (const auto& [s, p] : m.initial) {
    out << "joint";
    auto vals = m.unpackState(s);
    for (std::size_t f = 0; f < m.features.size(); ++f) {
      out << " " << m.features[f].values[vals[f]];
    }
    out << " " << formatValue(p) << "\n";
  }

  out << "\n[horizon]\n" << m.horizon << "\n";
  return out.str();
}

void saveModel(const Model& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ModelParseError("cannot open for writing: " + path);
  out << serializeModel(m);
}

}  // namespace comtdp
