#include "gprt/instance_io.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <json.hpp>

namespace gprt {

using nlohmann::json;

void write_instance(std::ostream& out, const TerminalInstance& inst) {
  json doc;
  doc["format"] = "gprt-instance";
  doc["version"] = 1;
  json quay = json::array(), yard = json::array(), remote = json::array();
  for (NodeId n = 1; n <= inst.quay_crane_count(); ++n) {
    quay.push_back(n);
    remote.push_back(inst.is_remote(n));
  }
  for (NodeId n = inst.quay_crane_count() + 1; n < inst.node_count(); ++n) yard.push_back(n);
  doc["nodes"] = {{"depot", kDepot}, {"quay_cranes", quay}, {"yard_cranes", yard}, {"remote", remote}};
  json travel = json::array();
  for (NodeId a = 0; a < inst.node_count(); ++a) {
    json row = json::array();
    for (NodeId b = 0; b < inst.node_count(); ++b) row.push_back(inst.travel(a, b));
    travel.push_back(std::move(row));
  }
  doc["travel"] = std::move(travel);
  doc["trucks"] = inst.truck_count();
  json tasks = json::array();
  for (const TaskSpec& t : inst.tasks()) {
    tasks.push_back({{"id", t.id},
                     {"src", t.source},
                     {"dst", t.destination},
                     {"ty", static_cast<int>(t.type)},
                     {"size", t.size},
                     {"d", t.source_op_time},
                     {"h", t.destination_op_time}});
  }
  doc["tasks"] = std::move(tasks);
  doc["q"] = inst.swap_window();
  doc["seed"] = inst.seed();
  out << doc.dump(1) << '\n';
}

void write_instance(const std::filesystem::path& path, const TerminalInstance& instance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write instance file " + path.string());
  write_instance(out, instance);
}

TerminalInstance read_instance(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InstanceError(std::string("instance file is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format") != "gprt-instance") throw InstanceError("not a gprt instance file");
    if (doc.at("version") != 1) throw InstanceError("unsupported instance file version");
    const json& nodes = doc.at("nodes");
    if (nodes.at("depot").get<NodeId>() != kDepot) throw InstanceError("depot must be node 0");
    const auto quay = nodes.at("quay_cranes").get<std::vector<NodeId>>();
    const auto yard = nodes.at("yard_cranes").get<std::vector<NodeId>>();
    for (std::size_t i = 0; i < quay.size(); ++i) {
      if (quay[i] != 1 + i) throw InstanceError("quay cranes must be numbered 1..Q");
    }
    for (std::size_t i = 0; i < yard.size(); ++i) {
      if (yard[i] != 1 + quay.size() + i) throw InstanceError("yard cranes must follow quay cranes");
    }
    const auto remote = nodes.at("remote").get<std::vector<bool>>();
    const std::size_t n = 1 + quay.size() + yard.size();
    const json& rows = doc.at("travel");
    if (rows.size() != n) throw InstanceError("travel matrix row count does not match nodes");
    TravelMatrix travel(n);
    for (std::size_t a = 0; a < n; ++a) {
      if (rows[a].size() != n) throw InstanceError("travel matrix row " + std::to_string(a) + " has wrong length");
      for (std::size_t b = 0; b < n; ++b) {
        if (rows[a][b].is_null()) throw InstanceError("unreachable travel entry");
        travel(a, b) = rows[a][b].get<double>();
      }
    }
    std::vector<TaskSpec> tasks;
    for (const json& t : doc.at("tasks")) {
      TaskSpec s;
      s.id = t.at("id").get<TaskId>();
      s.source = t.at("src").get<NodeId>();
      s.destination = t.at("dst").get<NodeId>();
      const int ty = t.at("ty").get<int>();
      if (ty != 0 && ty != 1) throw InstanceError("task type must be 0 or 1");
      s.type = static_cast<TaskType>(ty);
      s.size = t.at("size").get<int>();
      s.source_op_time = t.at("d").get<double>();
      s.destination_op_time = t.at("h").get<double>();
      tasks.push_back(s);
    }
    return TerminalInstance(quay.size(), yard.size(), remote, std::move(travel),
                            doc.at("trucks").get<std::size_t>(), std::move(tasks),
                            doc.at("q").get<std::size_t>(), doc.at("seed").get<std::uint64_t>());
  } catch (const json::exception& e) {
    throw InstanceError(std::string("malformed instance file: ") + e.what());
  }
}

TerminalInstance read_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open instance file " + path.string());
  return read_instance(in);
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::istreambuf_iterator<char> it(in), end; it != end; ++it) {
    h ^= static_cast<unsigned char>(*it);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace gprt
