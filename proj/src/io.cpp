#include "msm2/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "msm2/errors.hpp"
#include "msm2/rng.hpp"

namespace msm2 {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

int parse_int(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception&) {
    throw ValidationError("expected an integer for " + what + ", got \"" + s +
                          "\"");
  }
  if (pos != s.size())
    throw ValidationError("expected an integer for " + what + ", got \"" + s +
                          "\"");
  return v;
}

json parse_json_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": invalid JSON: " + e.what());
  }
}

const json& require_key(const json& j, const char* key,
                        const std::string& where) {
  auto it = j.find(key);
  if (it == j.end())
    throw ValidationError(where + ": missing key \"" + key + "\"");
  return *it;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path);
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

// --- trajectories ------------------------------------------------------------

std::vector<Trajectory> read_trajectories_csv(const std::string& path,
                                              const StateSpace& space) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw ValidationError(path + ": empty file");
  {
    const auto header = split_csv_line(line);
    if (header != std::vector<std::string>{"subject_id", "day", "state"})
      throw ValidationError(path +
                            ": expected header subject_id,day,state");
  }

  const int m = space.num_states();
  // subject -> (day -> state), subjects sorted by id.
  std::map<std::string, std::map<int, int>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 3)
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": expected 3 columns");
    const std::string& id = cells[0];
    if (id.empty())
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": empty subject id");
    const int day = parse_int(cells[1], "day");
    if (day < 1)
      throw ValidationError("subject \"" + id + "\": day " +
                            std::to_string(day) + " must be >= 1");
    int state;
    if (!cells[2].empty() &&
        cells[2].find_first_not_of("0123456789") == std::string::npos) {
      state = parse_int(cells[2], "state");
      if (state < 1 || state > m)
        throw ValidationError("subject \"" + id + "\": state index " +
                              std::to_string(state) + " out of range on day " +
                              std::to_string(day));
    } else {
      state = space.index_of(cells[2]) + 1;
    }
    auto [it, fresh] = rows[id].try_emplace(day, state);
    if (!fresh)
      throw ValidationError("subject \"" + id + "\": duplicate entry for day " +
                            std::to_string(day));
  }
  if (rows.empty()) throw ValidationError(path + ": no data rows");

  std::vector<Trajectory> dataset;
  dataset.reserve(rows.size());
  for (const auto& [id, days] : rows) {
    Trajectory t;
    t.subject_id = id;
    t.start_day = days.begin()->first;
    int expected = t.start_day;
    for (const auto& [day, state] : days) {
      if (day != expected)
        throw ValidationError("subject \"" + id + "\": gap at day " +
                              std::to_string(expected));
      t.states.push_back(state - 1);
      ++expected;
    }
    dataset.push_back(std::move(t));
  }
  return dataset;
}

std::string trajectories_to_csv(const std::vector<Trajectory>& dataset) {
  std::vector<const Trajectory*> order;
  order.reserve(dataset.size());
  for (const Trajectory& t : dataset) order.push_back(&t);
  std::sort(order.begin(), order.end(),
            [](const Trajectory* a, const Trajectory* b) {
              return a->subject_id < b->subject_id;
            });
  std::string out = "subject_id,day,state\n";
  for (const Trajectory* t : order)
    for (int i = 0; i < t->length(); ++i)
      out += t->subject_id + "," + std::to_string(t->day_of(i)) + "," +
             std::to_string(t->states[i] + 1) + "\n";
  return out;
}

void write_trajectories_csv(const std::string& path,
                            const std::vector<Trajectory>& dataset) {
  write_file(path, trajectories_to_csv(dataset));
}

// --- state space ---------------------------------------------------------------

StateSpace read_space_json(const std::string& path) {
  const json j = parse_json_file(path);
  const std::string where = path;
  std::vector<std::string> labels =
      require_key(j, "labels", where).get<std::vector<std::string>>();
  // "m" is redundant with the label count; accept its absence, reject a lie.
  if (auto it = j.find("m"); it != j.end() &&
                             it->get<int>() != static_cast<int>(labels.size()))
    throw ValidationError(where + ": labels size does not match m");
  std::vector<std::pair<int, int>> edges;
  for (const json& e : require_key(j, "adjacency", where)) {
    if (!e.is_array() || e.size() != 2)
      throw ValidationError(where + ": adjacency entries must be pairs");
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  std::vector<int> absorbing;
  if (auto it = j.find("absorbing"); it != j.end())
    absorbing = it->get<std::vector<int>>();
  return StateSpace::from_one_based(std::move(labels), edges, absorbing);
}

std::string space_to_json(const StateSpace& space) {
  json j;
  j["m"] = space.num_states();
  j["labels"] = space.labels();
  json adj = json::array();
  for (int f = 0; f < space.num_states(); ++f)
    for (int t = 0; t < space.num_states(); ++t)
      if (space.edge(f, t)) adj.push_back({f + 1, t + 1});
  j["adjacency"] = std::move(adj);
  json abs = json::array();
  for (int a : space.absorbing_states()) abs.push_back(a + 1);
  j["absorbing"] = std::move(abs);
  return j.dump(2) + "\n";
}

void write_space_json(const std::string& path, const StateSpace& space) {
  write_file(path, space_to_json(space));
}

// --- labels sidecar ---------------------------------------------------------

std::vector<std::string> read_labels_csv(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  std::map<int, std::string> by_index;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (line_no == 1 && cells.size() == 2 && cells[0] == "index") continue;
    if (cells.size() != 2)
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": expected index,label");
    const int idx = parse_int(cells[0], "index");
    if (!by_index.emplace(idx, cells[1]).second)
      throw ValidationError(path + ": duplicate index " + std::to_string(idx));
  }
  if (by_index.empty()) throw ValidationError(path + ": no labels");
  std::vector<std::string> labels;
  int expected = 1;
  for (const auto& [idx, label] : by_index) {
    if (idx != expected)
      throw ValidationError(path + ": label indices must be 1..m, missing " +
                            std::to_string(expected));
    labels.push_back(label);
    ++expected;
  }
  return labels;
}

void write_labels_csv(const std::string& path,
                      const std::vector<std::string>& labels) {
  std::string out = "index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i)
    out += std::to_string(i + 1) + "," + labels[i] + "\n";
  write_file(path, out);
}

// --- transition tensor ---------------------------------------------------------

TensorBundle read_tensor_json(const std::string& path) {
  const json j = parse_json_file(path);
  const std::string where = path;
  const int m = require_key(j, "m", where).get<int>();
  if (m < 1) throw ValidationError(where + ": m must be >= 1");

  TensorBundle bundle;
  bundle.labels =
      require_key(j, "labels", where).get<std::vector<std::string>>();
  if (static_cast<int>(bundle.labels.size()) != m)
    throw ValidationError(where + ": labels size does not match m");

  bundle.tensor = TransitionTensor::zeros(m);
  const json& mats = require_key(j, "matrices", where);
  if (!mats.is_array() || static_cast<int>(mats.size()) != m)
    throw ValidationError(where + ": matrices must hold m arrays");
  for (int h = 0; h < m; ++h) {
    const auto flat = mats[h].get<std::vector<double>>();
    if (static_cast<int>(flat.size()) != m * m)
      throw ValidationError(where + ": matrix " + std::to_string(h + 1) +
                            " must hold m*m values");
    for (int jj = 0; jj < m; ++jj)
      for (int k = 0; k < m; ++k)
        bundle.tensor.matrices[h](jj, k) = flat[static_cast<std::size_t>(jj) * m + k];
  }
  const json& sup = require_key(j, "support", where);
  if (!sup.is_array() || static_cast<int>(sup.size()) != m)
    throw ValidationError(where + ": support must hold m arrays");
  for (int h = 0; h < m; ++h) {
    const auto row = sup[h].get<std::vector<bool>>();
    if (static_cast<int>(row.size()) != m)
      throw ValidationError(where + ": support rows must hold m values");
    for (int jj = 0; jj < m; ++jj)
      bundle.tensor.support[static_cast<std::size_t>(h) * m + jj] =
          row[jj] ? 1 : 0;
  }

  const json& init = require_key(j, "init", where);
  bundle.init.initial_dist =
      require_key(init, "dist", where + ": init").get<std::vector<double>>();
  if (static_cast<int>(bundle.init.initial_dist.size()) != m)
    throw ValidationError(where + ": init.dist size does not match m");
  const json& fs = require_key(init, "first_step", where + ": init");
  if (!fs.is_array() || static_cast<int>(fs.size()) != m)
    throw ValidationError(where + ": init.first_step must hold m rows");
  bundle.init.first_step = Matrix(m, m);
  for (int h = 0; h < m; ++h) {
    const auto row = fs[h].get<std::vector<double>>();
    if (static_cast<int>(row.size()) != m)
      throw ValidationError(where + ": init.first_step rows must hold m values");
    for (int jj = 0; jj < m; ++jj) bundle.init.first_step(h, jj) = row[jj];
  }
  bundle.tensor.check_valid();
  bundle.init.check_valid();
  return bundle;
}

std::string tensor_to_json(const TensorBundle& bundle) {
  const int m = bundle.tensor.m;
  json j;
  j["m"] = m;
  j["labels"] = bundle.labels;
  json mats = json::array();
  for (int h = 0; h < m; ++h) {
    json flat = json::array();
    for (int jj = 0; jj < m; ++jj)
      for (int k = 0; k < m; ++k) flat.push_back(bundle.tensor.prob(h, jj, k));
    mats.push_back(std::move(flat));
  }
  j["matrices"] = std::move(mats);
  json sup = json::array();
  for (int h = 0; h < m; ++h) {
    json row = json::array();
    for (int jj = 0; jj < m; ++jj)
      row.push_back(bundle.tensor.supported(h, jj));
    sup.push_back(std::move(row));
  }
  j["support"] = std::move(sup);
  j["init"]["dist"] = bundle.init.initial_dist;
  json fs = json::array();
  for (int h = 0; h < m; ++h) {
    json row = json::array();
    for (int jj = 0; jj < m; ++jj) row.push_back(bundle.init.first_step(h, jj));
    fs.push_back(std::move(row));
  }
  j["init"]["first_step"] = std::move(fs);
  return j.dump(2) + "\n";
}

void write_tensor_json(const std::string& path, const TensorBundle& bundle) {
  write_file(path, tensor_to_json(bundle));
}

// --- result tables ------------------------------------------------------------

void write_curve_csv(const std::string& path, const PredictionCurve& curve) {
  std::string out = "n,probability\n";
  for (std::size_t i = 0; i < curve.values.size(); ++i)
    out += std::to_string(i + 1) + "," + fmt_double(curve.values[i]) + "\n";
  write_file(path, out);
}

void write_markov_report_csv(const std::string& path,
                             const MarkovTestReport& report,
                             const StateSpace& space) {
  std::string out = "transition,statistic";
  for (const ConditionResult& c : report.conditions)
    out += ",p_" + space.label(c.cond);
  out += ",overall_mean,overall_max\n";

  const std::string transition =
      space.label(report.from) + "->" + space.label(report.to);
  const auto row = [&](const char* stat, auto per_cond, double pmean,
                       double pmax) {
    out += transition;
    out += ",";
    out += stat;
    for (const ConditionResult& c : report.conditions)
      out += "," + fmt_double(per_cond(c));
    out += "," + fmt_double(pmean) + "," + fmt_double(pmax) + "\n";
  };
  row("mean_abs", [](const ConditionResult& c) { return c.p_mean_abs; },
      report.overall.p_mean_of_mean_abs, report.overall.p_max_of_mean_abs);
  row("weighted_abs",
      [](const ConditionResult& c) { return c.p_weighted_abs; },
      report.overall.p_mean_of_weighted_abs,
      report.overall.p_max_of_weighted_abs);
  row("max_abs", [](const ConditionResult& c) { return c.p_max_abs; },
      report.overall.p_mean_of_max_abs, report.overall.p_max_of_max_abs);
  write_file(path, out);
}

void write_two_step_csv(const std::string& path,
                        const std::vector<TwoStepPathSummary>& summaries,
                        const StateSpace& space) {
  std::string out = "from,to,total,via,count,percent\n";
  char buf[32];
  for (const TwoStepPathSummary& s : summaries) {
    for (const TwoStepPathRow& r : s.rows) {
      const std::string via = r.via == TwoStepPathSummary::kAdmission
                                  ? "admission"
                                  : space.label(r.via);
      std::snprintf(buf, sizeof(buf), "%.2f",
                    100.0 * static_cast<double>(r.count) /
                        static_cast<double>(s.total));
      out += space.label(s.from) + "," + space.label(s.to) + "," +
             std::to_string(s.total) + "," + via + "," +
             std::to_string(r.count) + "," + buf + "\n";
    }
  }
  write_file(path, out);
}

// --- manifest --------------------------------------------------------------------

std::string manifest_to_json(const RunManifest& manifest) {
  json j;
  j["command"] = manifest.command;
  j["generator"] = rng::kGeneratorId;
  json params = json::object();
  for (const auto& [k, v] : manifest.parameters) params[k] = v;
  j["parameters"] = std::move(params);
  json inputs = json::array();
  for (const std::string& p : manifest.input_paths) {
    json entry;
    entry["path"] = p;
    entry["fnv1a64"] = fnv1a64_hex(read_file(p));
    inputs.push_back(std::move(entry));
  }
  j["inputs"] = std::move(inputs);
  j["outputs"] = manifest.output_paths;
  return j.dump(2) + "\n";
}

void write_manifest(const std::string& output_path,
                    const RunManifest& manifest) {
  write_file(output_path + ".manifest.json", manifest_to_json(manifest));
}

}  // namespace msm2
