#pragma once

// Task files: JSON with rational strings, e.g.
//
//   {"dim_x": 1, "dim_y": 1,
//    "tasks": [{"id": 1, "atoms": [["1", "1/2"], ["1", "3/2"]]}]}
//
// Each atom row is [x_1..x_dx, y_1..y_dy]. A document with a top-level
// "atoms" array instead of "tasks" is read as a single task with id 1.

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "satcl/criteria.hpp"
#include "satcl/error.hpp"
#include "satcl/rational.hpp"

namespace satcl {

namespace detail {

inline std::vector<Atom> atoms_from_json(const nlohmann::json& rows, std::size_t dx, std::size_t dy) {
  if (!rows.is_array()) throw InvalidInput("task file: 'atoms' must be an array");
  std::vector<Atom> atoms;
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != dx + dy)
      throw InvalidInput("task file: every atom needs dim_x + dim_y = " + std::to_string(dx + dy) + " entries");
    Atom a;
    for (std::size_t i = 0; i < dx + dy; ++i) {
      const auto& cell = row[i];
      Rat v;
      if (cell.is_string())
        v = parse_rat(cell.get<std::string>());
      else if (cell.is_number_integer())
        v = Rat(static_cast<long>(cell.get<std::int64_t>()));
      else
        throw InvalidInput("task file: atom entries must be rational strings");
      (i < dx ? a.x : a.y).push_back(std::move(v));
    }
    atoms.push_back(std::move(a));
  }
  return atoms;
}

}  // namespace detail

inline std::vector<EmpiricalTask> tasks_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("dim_x") || !doc.contains("dim_y"))
    throw InvalidInput("task file: expected an object with dim_x and dim_y");
  const auto dx = doc.at("dim_x").get<std::size_t>();
  const auto dy = doc.at("dim_y").get<std::size_t>();
  std::vector<EmpiricalTask> tasks;
  if (doc.contains("tasks")) {
    std::size_t next_id = 1;
    for (const auto& t : doc.at("tasks")) {
      const std::size_t id = t.contains("id") ? t.at("id").get<std::size_t>() : next_id;
      tasks.emplace_back(id, detail::atoms_from_json(t.at("atoms"), dx, dy));
      next_id = id + 1;
    }
  } else if (doc.contains("atoms")) {
    tasks.emplace_back(1, detail::atoms_from_json(doc.at("atoms"), dx, dy));
  } else {
    throw InvalidInput("task file: needs 'tasks' or 'atoms'");
  }
  if (tasks.empty()) throw InvalidInput("task file: no tasks");
  return tasks;
}

inline nlohmann::json tasks_to_json(const std::vector<EmpiricalTask>& tasks) {
  if (tasks.empty()) throw InvalidInput("cannot serialize an empty stream");
  nlohmann::json doc;
  doc["dim_x"] = tasks.front().dim_x();
  doc["dim_y"] = tasks.front().dim_y();
  doc["tasks"] = nlohmann::json::array();
  for (const auto& t : tasks) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& a : t.atoms()) {
      nlohmann::json row = nlohmann::json::array();
      for (const auto& v : a.x) row.push_back(to_string(v));
      for (const auto& v : a.y) row.push_back(to_string(v));
      rows.push_back(std::move(row));
    }
    doc["tasks"].push_back({{"id", t.id()}, {"atoms", std::move(rows)}});
  }
  return doc;
}

inline std::vector<EmpiricalTask> parse_tasks(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("task file: ") + e.what());
  }
  try {
    return tasks_from_json(doc);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("task file: ") + e.what());
  }
}

inline std::string format_tasks(const std::vector<EmpiricalTask>& tasks) { return tasks_to_json(tasks).dump(2) + "\n"; }

inline std::vector<EmpiricalTask> read_tasks(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open task file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_tasks(ss.str());
}

inline void write_tasks(const std::string& path, const std::vector<EmpiricalTask>& tasks) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write task file '" + path + "'");
  out << format_tasks(tasks);
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace satcl
