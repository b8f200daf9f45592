#include "abn/format.hpp"

#include <sstream>

#include <json.hpp>

#include "abn/errors.hpp"

namespace abn {

namespace {

using nlohmann::ordered_json;

const ordered_json& expect(const ordered_json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) {
    fail(Errc::syntax, where + ": missing key '" + key + "'");
  }
  return *it;
}

std::vector<double> number_row(const ordered_json& j, const std::string& where) {
  if (!j.is_array()) fail(Errc::syntax, where + ": expected an array of numbers");
  std::vector<double> row;
  row.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) fail(Errc::syntax, where + ": expected a number");
    row.push_back(v.get<double>());
  }
  return row;
}

std::vector<std::vector<double>> rows_field(const ordered_json& j, const std::string& where) {
  const ordered_json& rows = expect(j, "rows", where);
  if (!rows.is_array()) fail(Errc::syntax, where + ": 'rows' must be an array");
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::ostringstream sub;
    sub << where << ", row " << r;
    out.push_back(number_row(rows[r], sub.str()));
  }
  return out;
}

std::vector<int> parent_ids(const ordered_json& list, const Network& net,
                            const std::string& where) {
  std::vector<int> ids;
  ids.reserve(list.size());
  for (const auto& p : list) {
    if (!p.is_string()) fail(Errc::syntax, where + ": parent names must be strings");
    int id = net.variable_index(p.get<std::string>());
    if (id < 0) {
      fail(Errc::dangling_reference,
           where + ": unknown variable '" + p.get<std::string>() + "'");
    }
    ids.push_back(id);
  }
  return ids;
}

}  // namespace

Network parse_network(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::ostringstream msg;
    msg << "network file, byte " << e.byte << ": " << e.what();
    fail(Errc::syntax, msg.str());
  }
  if (!doc.is_object()) fail(Errc::syntax, "network file: expected a JSON object");

  Network net;
  if (doc.contains("description") && doc["description"].is_string()) {
    net.description = doc["description"].get<std::string>();
  }

  const ordered_json& vars = expect(doc, "variables", "network file");
  if (!vars.is_array()) fail(Errc::syntax, "network file: 'variables' must be an array");
  for (const auto& v : vars) {
    Variable var;
    const ordered_json& name = expect(v, "name", "variable entry");
    const ordered_json& states = expect(v, "states", "variable entry");
    if (!name.is_string() || !states.is_array()) {
      fail(Errc::syntax, "variable entry: 'name' must be a string and 'states' an array");
    }
    var.name = name.get<std::string>();
    for (const auto& s : states) {
      if (!s.is_string()) fail(Errc::syntax, "variable '" + var.name + "': states must be strings");
      var.states.push_back(s.get<std::string>());
    }
    net.variables.push_back(std::move(var));
  }

  const ordered_json& nodes = expect(doc, "nodes", "network file");
  if (!nodes.is_array()) fail(Errc::syntax, "network file: 'nodes' must be an array");
  net.nodes.resize(net.variables.size());
  std::vector<bool> filled(net.variables.size(), false);
  for (const auto& entry : nodes) {
    const ordered_json& name = expect(entry, "var", "node entry");
    if (!name.is_string()) fail(Errc::syntax, "node entry: 'var' must be a string");
    int id = net.variable_index(name.get<std::string>());
    if (id < 0) {
      fail(Errc::dangling_reference,
           "node entry: unknown variable '" + name.get<std::string>() + "'");
    }
    const std::string where = "node '" + net.var(id).name + "'";
    if (filled[static_cast<std::size_t>(id)]) {
      fail(Errc::syntax, where + ": duplicate node entry");
    }
    filled[static_cast<std::size_t>(id)] = true;

    std::vector<int> parents = parent_ids(expect(entry, "parents", where), net, where);
    const ordered_json& cpt = expect(entry, "cpt", where);
    const ordered_json& type = expect(cpt, "type", where);
    if (type == "full") {
      FullCpt full;
      full.child = id;
      full.parents = parents;
      full.rows = rows_field(cpt, where);
      net.nodes[static_cast<std::size_t>(id)] = std::move(full);
    } else if (type == "additive") {
      AdditiveCpt add;
      add.child = id;
      add.parents = parents;
      const ordered_json& terms = expect(cpt, "terms", where);
      if (!terms.is_array()) fail(Errc::syntax, where + ": 'terms' must be an array");
      for (std::size_t t = 0; t < terms.size(); ++t) {
        std::ostringstream sub;
        sub << where << ", term " << t;
        AdditiveTerm term;
        const ordered_json& weight = expect(terms[t], "weight", sub.str());
        if (!weight.is_number()) fail(Errc::syntax, sub.str() + ": 'weight' must be a number");
        term.weight = weight.get<double>();
        term.given = parent_ids(expect(terms[t], "given", sub.str()), net, sub.str());
        term.rows = rows_field(terms[t], sub.str());
        add.terms.push_back(std::move(term));
      }
      net.nodes[static_cast<std::size_t>(id)] = std::move(add);
    } else {
      fail(Errc::syntax, where + ": cpt type must be 'full' or 'additive'");
    }
  }
  for (std::size_t i = 0; i < filled.size(); ++i) {
    if (!filled[i]) {
      fail(Errc::syntax, "variable '" + net.variables[i].name + "' has no node entry");
    }
  }

  normalize_probabilities(net);
  validate_network(net);
  return net;
}

std::string serialize_network(const Network& net) {
  ordered_json doc;
  if (!net.description.empty()) doc["description"] = net.description;
  doc["variables"] = ordered_json::array();
  for (const Variable& v : net.variables) {
    doc["variables"].push_back({{"name", v.name}, {"states", v.states}});
  }
  doc["nodes"] = ordered_json::array();
  for (int id = 0; id < net.node_count(); ++id) {
    ordered_json entry;
    entry["var"] = net.var(id).name;
    ordered_json parents = ordered_json::array();
    for (int p : net.parents_of(id)) parents.push_back(net.var(p).name);
    entry["parents"] = std::move(parents);
    const NodeCpt& cpt = net.nodes[static_cast<std::size_t>(id)];
    if (const auto* full = std::get_if<FullCpt>(&cpt)) {
      entry["cpt"] = {{"type", "full"}, {"rows", full->rows}};
    } else {
      const auto& add = std::get<AdditiveCpt>(cpt);
      ordered_json terms = ordered_json::array();
      for (const AdditiveTerm& t : add.terms) {
        ordered_json given = ordered_json::array();
        for (int g : t.given) given.push_back(net.var(g).name);
        terms.push_back({{"weight", t.weight}, {"given", std::move(given)}, {"rows", t.rows}});
      }
      entry["cpt"] = {{"type", "additive"}, {"terms", std::move(terms)}};
    }
    doc["nodes"].push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

}  // namespace

CaseSet parse_cases(const std::string& text, const Network& net) {
  std::istringstream in(text);
  std::string line;
  CaseSet cases;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    std::vector<std::string> cells = split_csv(t);
    if (!have_header) {
      for (const std::string& name : cells) {
        int id = net.variable_index(name);
        if (id < 0) {
          fail(Errc::unknown_variable, "case file header: unknown variable '" + name + "'");
        }
        cases.columns.push_back(id);
      }
      have_header = true;
      continue;
    }
    if (cells.size() != cases.columns.size()) {
      std::ostringstream msg;
      msg << "case file, line " << line_no << ": expected " << cases.columns.size()
          << " cells, found " << cells.size();
      fail(Errc::syntax, msg.str());
    }
    std::vector<int> row(cells.size(), CaseSet::kMissing);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i] == "?") continue;
      const Variable& var = net.var(cases.columns[i]);
      int s = var.state_index(cells[i]);
      if (s < 0) {
        std::ostringstream msg;
        msg << "case file, line " << line_no << ": '" << cells[i]
            << "' is not a state of " << var.name;
        fail(Errc::unknown_state, msg.str());
      }
      row[i] = s;
    }
    cases.rows.push_back(std::move(row));
  }
  if (!have_header) fail(Errc::syntax, "case file: missing header row");
  return cases;
}

std::string serialize_cases(const CaseSet& cases, const Network& net) {
  std::ostringstream out;
  for (std::size_t i = 0; i < cases.columns.size(); ++i) {
    if (i) out << ',';
    out << net.var(cases.columns[i]).name;
  }
  out << '\n';
  for (const auto& row : cases.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      if (row[i] == CaseSet::kMissing) {
        out << '?';
      } else {
        out << net.var(cases.columns[i]).states[static_cast<std::size_t>(row[i])];
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace abn
