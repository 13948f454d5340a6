#ifndef FAIRREC_IO_HPP
#define FAIRREC_IO_HPP

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "fairrec/bounds.hpp"
#include "fairrec/error.hpp"
#include "fairrec/graph.hpp"
#include "fairrec/model.hpp"
#include "fairrec/random.hpp"
#include "fairrec/solver.hpp"

namespace fairrec {

inline constexpr const char *kArtifactVersion = "1.0.0";

using Json = nlohmann::json;

namespace detail {

inline Json to_json_array(const Eigen::VectorXd &v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline Eigen::VectorXd vector_from_json(const Json &j, const char *what) {
  if (!j.is_array()) throw InvalidArgument(std::string(what) + " must be an array of numbers");
  Eigen::VectorXd out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InvalidArgument(std::string(what) + " must contain numbers only");
    out(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return out;
}

inline Json labels_to_json(const Labels &y) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < y.size(); ++i) out.push_back(static_cast<int>(y(i)));
  return out;
}

template <typename T>
T field(const Json &j, const char *key) {
  if (!j.contains(key)) throw InvalidArgument(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception &e) {
    throw InvalidArgument(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Instance / observation document:
//   {n, edges:[[u,v]...], y_bar:[...], attributes:[[...]...],
//    x_entries:[[u,v,s]...], c:[...], p, q, seed}
// The observation fields are optional on input.

struct InstanceDocument {
  Instance instance;
  std::optional<Observation> observation;
};

inline Json to_json(const Instance &inst, const Observation *obs = nullptr) {
  Json j;
  j["n"] = inst.size();
  Json edges = Json::array();
  for (const auto &[u, v] : inst.graph.edges()) edges.push_back({u, v});
  j["edges"] = std::move(edges);
  j["y_bar"] = detail::labels_to_json(inst.y_bar);
  Json attributes = Json::array();
  for (const auto &a : inst.attributes) attributes.push_back(detail::to_json_array(a));
  j["attributes"] = std::move(attributes);
  if (obs) {
    Json entries = Json::array();
    for (const auto &[u, v] : inst.graph.edges()) {
      entries.push_back({u, v, static_cast<int>(obs->x(u, v))});
    }
    j["x_entries"] = std::move(entries);
    j["c"] = detail::labels_to_json(obs->c);
    j["p"] = obs->p;
    j["q"] = obs->q;
    j["seed"] = obs->seed;
  }
  return j;
}

inline InstanceDocument instance_from_json(const Json &j) {
  if (!j.is_object()) throw InvalidArgument("instance document must be a JSON object");
  const int n = detail::field<int>(j, "n");
  std::vector<Edge> edges;
  for (const auto &e : detail::field<std::vector<std::vector<int>>>(j, "edges")) {
    if (e.size() != 2) throw InvalidArgument("edges entries must be [u, v]");
    edges.emplace_back(e[0], e[1]);
  }
  Graph graph(n, std::move(edges));
  Labels y_bar = detail::vector_from_json(j.at("y_bar"), "y_bar");
  std::vector<Eigen::VectorXd> attributes;
  if (j.contains("attributes")) {
    for (const auto &a : j.at("attributes")) attributes.push_back(detail::vector_from_json(a, "attribute"));
  }
  InstanceDocument doc{make_instance(std::move(graph), std::move(y_bar), std::move(attributes)),
                       std::nullopt};

  if (j.contains("x_entries")) {
    Observation obs;
    obs.x = Eigen::MatrixXd::Zero(n, n);
    for (const auto &e : detail::field<std::vector<std::vector<int>>>(j, "x_entries")) {
      if (e.size() != 3) throw InvalidArgument("x_entries entries must be [u, v, s]");
      const int u = e[0];
      const int v = e[1];
      const int s = e[2];
      detail::require(u >= 0 && v >= 0 && u < n && v < n, "x_entries endpoint out of range");
      detail::require(s >= -1 && s <= 1, "x_entries values must be -1, 0 or +1");
      detail::require(s == 0 || doc.instance.graph.has_edge(u, v),
                      "x_entries has a nonzero value on a non-edge");
      obs.x(u, v) = s;
      obs.x(v, u) = s;
    }
    obs.c = detail::vector_from_json(j.at("c"), "c");
    detail::require(obs.c.size() == n && is_sign_vector(obs.c), "c must be a +-1 vector of length n");
    obs.p = j.value("p", 0.0);
    obs.q = j.value("q", 0.0);
    obs.seed = j.value("seed", std::uint64_t{0});
    doc.observation = std::move(obs);
  }
  return doc;
}

inline SdpConfig sdp_config_from_json(const Json &j) {
  if (!j.is_object()) throw InvalidArgument("solver config must be a JSON object");
  SdpConfig cfg;
  cfg.primal_tol = j.value("primal_tol", cfg.primal_tol);
  cfg.dual_tol = j.value("dual_tol", cfg.dual_tol);
  cfg.max_iters = j.value("max_iters", cfg.max_iters);
  cfg.penalty = j.value("penalty", cfg.penalty);
  cfg.adaptive_penalty = j.value("adaptive_penalty", cfg.adaptive_penalty);
  cfg.relaxation = j.value("relaxation", cfg.relaxation);
  validate(cfg);
  return cfg;
}

inline Json to_json(const BoundReport &r) {
  return Json{{"n", r.n},
              {"k", r.k},
              {"deg_max", r.deg_max},
              {"delta", r.delta},
              {"eps1", r.eps1},
              {"eps2", r.eps2},
              {"sigma_sq", r.sigma_sq},
              {"r_const", r.r_const},
              {"exponent", r.exponent},
              {"prob_lower_bound", r.prob_lower_bound},
              {"vacuous", r.vacuous},
              {"phi_used", r.phi_used},
              {"phi_mode", r.phi_mode == ExpansionMode::kExact ? "exact" : "spectral-lower"}};
}

// ---------------------------------------------------------------------------
// Files

inline std::string read_text_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Json read_json_file(const std::filesystem::path &path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error &e) {
    throw InvalidArgument("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

inline Graph read_graph_file(const std::filesystem::path &path) {
  std::istringstream in(read_text_file(path));
  return read_edge_list(in);
}

// Writes through a temporary sibling and renames, so a failed run never
// leaves a partial file behind.
inline void write_text_file(const std::filesystem::path &path, const std::string &content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    if (!out.flush()) throw Error("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Run manifest written next to every output file as <file>.manifest.json.

struct RunManifest {
  std::string command;
  std::map<std::string, std::string> parameters;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::string artifact_version = kArtifactVersion;
  std::string timestamp;
};

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline Json to_json(const RunManifest &m) {
  Json j{{"command", m.command},
         {"parameters", m.parameters},
         {"artifact_version", m.artifact_version},
         {"prng", kPrngName},
         {"timestamp", m.timestamp}};
  j["seed"] = m.has_seed ? Json(m.seed) : Json(nullptr);
  return j;
}

inline std::filesystem::path manifest_path(const std::filesystem::path &output) {
  std::filesystem::path out = output;
  out += ".manifest.json";
  return out;
}

}  // namespace fairrec

#endif  // FAIRREC_IO_HPP
