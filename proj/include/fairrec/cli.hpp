#ifndef FAIRREC_CLI_HPP
#define FAIRREC_CLI_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairrec/bounds.hpp"
#include "fairrec/error.hpp"
#include "fairrec/experiments.hpp"
#include "fairrec/expansion.hpp"
#include "fairrec/graph.hpp"
#include "fairrec/io.hpp"
#include "fairrec/model.hpp"
#include "fairrec/random.hpp"
#include "fairrec/solver.hpp"
#include "fairrec/spectral.hpp"

namespace fairrec::cli {

// Stable process exit codes.
enum ExitCode : int { kOk = 0, kRuntimeFailure = 1, kInvalidArguments = 2 };

namespace detail {

using fairrec::detail::parse_double;
using fairrec::detail::parse_int;
using fairrec::detail::split;

// Numeric parameters for `graph gen --params`, separated by ',' or 'x'.
inline std::vector<std::string> split_params(const std::string &text) {
  std::string normalized = text;
  std::replace(normalized.begin(), normalized.end(), 'x', ',');
  std::vector<std::string> out;
  for (auto part : split(normalized, ',')) out.emplace_back(part);
  return out;
}

inline int param_int(const std::vector<std::string> &params, std::size_t i, const char *what) {
  if (i >= params.size()) throw InvalidArgument(std::string("missing parameter: ") + what);
  const auto v = parse_int(params[i]);
  if (!v) throw InvalidArgument(std::string("parameter ") + what + " must be an integer");
  return static_cast<int>(*v);
}

inline Graph build_graph(const std::string &family, const std::string &params_text,
                         std::optional<std::uint64_t> seed) {
  const auto params = split_params(params_text);
  auto expect = [&](std::size_t count, const char *usage) {
    if (params.size() != count) {
      throw InvalidArgument("--params for family '" + family + "' must be " + usage);
    }
  };
  if (family == "grid") {
    expect(2, "ROWS,COLS");
    return grid(param_int(params, 0, "ROWS"), param_int(params, 1, "COLS"));
  }
  if (family == "complete") {
    expect(1, "N");
    return complete(param_int(params, 0, "N"));
  }
  if (family == "star") {
    expect(1, "N");
    return star(param_int(params, 0, "N"));
  }
  if (family == "cjoin") {
    expect(2, "N,T");
    return complement_join(param_int(params, 0, "N"), param_int(params, 1, "T"));
  }
  if (family == "er") {
    expect(2, "N,R");
    if (!seed) throw InvalidArgument("family 'er' is random and requires --seed");
    const auto r = parse_double(params[1]);
    if (!r) throw InvalidArgument("parameter R must be a number");
    return erdos_renyi(param_int(params, 0, "N"), *r, *seed);
  }
  throw InvalidArgument("unknown graph family '" + family + "'");
}

inline Json json_array(const std::vector<double> &values) {
  Json out = Json::array();
  for (double v : values) out.push_back(v);
  return out;
}

inline std::string dump(const Json &j) { return j.dump(2) + "\n"; }

// Writes `content` to `path` plus its manifest sidecar.
inline void emit(const std::filesystem::path &path, const std::string &content,
                 const RunManifest &manifest) {
  write_text_file(path, content);
  write_text_file(manifest_path(path), dump(to_json(manifest)));
}

inline RunManifest manifest_for(const CLI::App &sub, const std::string &command,
                                std::optional<std::uint64_t> seed) {
  RunManifest m;
  m.command = command;
  for (const CLI::Option *opt : sub.get_options()) {
    if (opt->count() == 0 || opt->get_name() == "--help") continue;
    std::string joined;
    for (const auto &r : opt->results()) joined += (joined.empty() ? "" : " ") + r;
    m.parameters[opt->get_name()] = joined.empty() ? "true" : joined;
  }
  if (seed) {
    m.seed = *seed;
    m.has_seed = true;
  }
  m.timestamp = utc_timestamp();
  return m;
}

}  // namespace detail

// Parses argv (without the program name), runs the selected command and
// returns an ExitCode. Data goes to files or `out`; diagnostics go to `err`.
inline int dispatch(std::vector<std::string> args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Fairness-constrained exact recovery: instance generation, SDP inference, "
               "dual certificates, recovery bounds and experiments.",
               "fairrec"};
  app.set_version_flag("--version",
                       std::string("fairrec ") + kArtifactVersion + "\nprng: " + kPrngName);
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  std::function<void()> action;

  // graph gen
  CLI::App *graph_cmd = app.add_subcommand("graph", "Graph utilities");
  graph_cmd->require_subcommand(1);
  CLI::App *graph_gen = graph_cmd->add_subcommand("gen", "Generate a graph edge list");
  std::string family;
  std::string params;
  std::optional<std::uint64_t> graph_seed;
  std::string graph_out;
  graph_gen->add_option("--family", family, "grid | complete | star | cjoin | er")
      ->required()
      ->check(CLI::IsMember({"grid", "complete", "star", "cjoin", "er"}));
  graph_gen->add_option("--params", params,
                        "grid: ROWS,COLS  complete|star: N  cjoin: N,T  er: N,R")
      ->required();
  graph_gen->add_option("--seed", graph_seed, "PRNG seed (required for er)");
  graph_gen->add_option("--out", graph_out, "Output edge-list file")->required();
  graph_gen->callback([&] {
    action = [&] {
      const Graph g = detail::build_graph(family, params, graph_seed);
      if (!g.is_connected()) err << "warning: generated graph is disconnected\n";
      detail::emit(graph_out, to_edge_list(g), detail::manifest_for(*graph_gen, "graph gen", graph_seed));
    };
  });

  // spectrum
  CLI::App *spectrum_cmd = app.add_subcommand("spectrum", "Laplacian spectrum, gap and Fiedler vector");
  std::string spectrum_graph;
  std::vector<int> closed_form;
  spectrum_cmd->add_option("--graph", spectrum_graph, "Edge-list file")->required();
  spectrum_cmd->add_option("--closed-form-grid", closed_form, "Compare with the Grid(M,N) closed form")
      ->expected(2);
  spectrum_cmd->callback([&] {
    action = [&] {
      const Graph g = read_graph_file(spectrum_graph);
      const Spectrum s = laplacian_spectrum(g);
      Json j;
      j["n"] = g.vertex_count();
      std::vector<double> eigenvalues(s.eigenvalues.data(), s.eigenvalues.data() + s.size());
      j["eigenvalues"] = detail::json_array(eigenvalues);
      j["connected"] = g.is_connected();
      if (g.is_connected() && g.vertex_count() >= 2) {
        const FiedlerVector f = fiedler_from_spectrum(s);
        j["delta"] = spectral_gap(s);
        j["lambda2"] = f.lambda2;
        j["fiedler"] = fairrec::detail::to_json_array(f.vector);
        j["multiplicity"] = f.multiplicity;
        j["multiplicity_flag"] = f.ambiguous();
      } else {
        j["delta"] = nullptr;
        j["lambda2"] = nullptr;
        j["fiedler"] = nullptr;
        j["multiplicity"] = nullptr;
        j["multiplicity_flag"] = nullptr;
      }
      if (!closed_form.empty()) {
        const auto cf = grid_spectrum_closed_form(closed_form[0], closed_form[1]);
        Json c{{"m", closed_form[0]}, {"n", closed_form[1]}, {"eigenvalues", detail::json_array(cf)}};
        if (static_cast<int>(cf.size()) == s.size()) {
          double worst = 0.0;
          for (int i = 0; i < s.size(); ++i) worst = std::max(worst, std::abs(cf[i] - s.eigenvalues(i)));
          c["max_abs_diff"] = worst;
        } else {
          c["max_abs_diff"] = nullptr;
        }
        j["closed_form"] = std::move(c);
      }
      out << detail::dump(j);
    };
  });

  // model gen
  CLI::App *model_cmd = app.add_subcommand("model", "Instance generation");
  model_cmd->require_subcommand(1);
  CLI::App *model_gen = model_cmd->add_subcommand("gen", "Plant fair labels and draw one observation");
  std::string model_graph;
  int model_k = 0;
  double model_p = 0.0;
  double model_q = 0.0;
  std::uint64_t model_seed = 0;
  std::string model_out;
  model_gen->add_option("--graph", model_graph, "Edge-list file")->required();
  model_gen->add_option("--k", model_k, "Number of fair attributes")->default_val(0);
  model_gen->add_option("--p", model_p, "Edge noise in [0, 0.5)")->required();
  model_gen->add_option("--q", model_q, "Node noise in [0, 0.5)")->required();
  model_gen->add_option("--seed", model_seed, "PRNG seed")->required();
  model_gen->add_option("--out", model_out, "Output instance JSON")->required();
  model_gen->callback([&] {
    action = [&] {
      const Graph g = read_graph_file(model_graph);
      Labels y_bar = sample_labels(g.vertex_count(), derive_seed({model_seed, fairrec::detail::kTagTruth}));
      auto attrs = sample_fair_attributes(y_bar, model_k, derive_seed({model_seed, fairrec::detail::kTagAttributes}));
      const Instance inst = make_instance(g, std::move(y_bar), std::move(attrs));
      Observation obs = observe(inst, model_p, model_q, derive_seed({model_seed, fairrec::detail::kTagObservation}));
      obs.seed = model_seed;
      detail::emit(model_out, detail::dump(to_json(inst, &obs)),
                   detail::manifest_for(*model_gen, "model gen", model_seed));
    };
  });

  // solve
  CLI::App *solve_cmd = app.add_subcommand("solve", "Solve the SDP relaxation and certify");
  std::string solve_instance;
  std::string solve_config;
  std::string solve_out;
  solve_cmd->add_option("--instance", solve_instance, "Instance JSON with observation")->required();
  solve_cmd->add_option("--config", solve_config, "Solver config JSON (defaults if omitted)");
  solve_cmd->add_option("--out", solve_out, "Output result JSON")->required();
  solve_cmd->callback([&] {
    action = [&] {
      const InstanceDocument doc = instance_from_json(read_json_file(solve_instance));
      if (!doc.observation) throw InvalidArgument("instance has no observation (x_entries, c)");
      const SdpConfig cfg =
          solve_config.empty() ? SdpConfig{} : sdp_config_from_json(read_json_file(solve_config));
      const Observation &obs = *doc.observation;
      const SdpSolution sol = solve_sdp(obs.x, doc.instance.attributes, cfg);
      for (const auto &w : sol.warnings) err << "warning: " << w << '\n';
      const Labels labels = round_solution(sol, obs.c);
      const CertificateReport cert = dual_certificate(obs.x, doc.instance.attributes, doc.instance.y_bar);
      Json j{{"objective", sol.objective},
             {"status", to_string(sol.status)},
             {"iterations", sol.iterations},
             {"primal_residual", sol.primal_residual},
             {"dual_residual", sol.dual_residual},
             {"labels", fairrec::detail::labels_to_json(labels)},
             {"recovered", check_exact_recovery(labels, doc.instance.y_bar)},
             {"certificate",
              {{"lambda2", cert.lambda2_of_Lambda},
               {"holds", cert.holds},
               {"residual_null", cert.residual_null}}}};
      detail::emit(solve_out, detail::dump(j), detail::manifest_for(*solve_cmd, "solve", std::nullopt));
    };
  });

  // bound
  CLI::App *bound_cmd = app.add_subcommand("bound", "Evaluate the exact-recovery probability bound");
  std::string bound_graph;
  std::string bound_instance;
  double bound_p = 0.0;
  bound_cmd->add_option("--graph", bound_graph, "Edge-list file")->required();
  bound_cmd->add_option("--instance", bound_instance, "Instance JSON supplying the attributes");
  bound_cmd->add_option("--p", bound_p, "Edge noise in (0, 0.5)")->required();
  bound_cmd->callback([&] {
    action = [&] {
      const Graph g = read_graph_file(bound_graph);
      std::vector<Eigen::VectorXd> attributes;
      if (!bound_instance.empty()) {
        InstanceDocument doc = instance_from_json(read_json_file(bound_instance));
        if (doc.instance.size() != g.vertex_count()) {
          throw InvalidArgument("instance and graph have different vertex counts");
        }
        attributes = std::move(doc.instance.attributes);
      }
      out << detail::dump(to_json(recovery_probability_bound(g, attributes, bound_p)));
    };
  });

  // experiment fig1 | fig2
  CLI::App *experiment_cmd = app.add_subcommand("experiment", "Monte-Carlo experiments");
  experiment_cmd->require_subcommand(1);
  CLI::App *fig1 = experiment_cmd->add_subcommand("fig1", "Eigen-gap statistics over Erdos-Renyi graphs");
  std::string fig1_n;
  std::string fig1_r;
  int fig1_trials = 1000;
  std::uint64_t fig1_seed = 0;
  std::string fig1_out;
  int fig1_threads = 1;
  fig1->add_option("--n", fig1_n, "Sizes: START:STOP:STEP or a comma list")->required();
  fig1->add_option("--r", fig1_r, "Edge probability, '2logn/n' or '2^(logn/n)'")->required();
  fig1->add_option("--trials", fig1_trials, "Graphs per size")->default_val(1000);
  fig1->add_option("--seed", fig1_seed, "PRNG seed")->required();
  fig1->add_option("--out", fig1_out, "Output CSV")->required();
  fig1->add_option("--threads", fig1_threads, "Worker threads")->default_val(1)->check(CLI::PositiveNumber);
  fig1->callback([&] {
    action = [&] {
      const auto rows = run_fig1(parse_int_range(fig1_n), fig1_r, fig1_trials, fig1_seed, fig1_threads);
      std::ostringstream csv;
      write_fig1_csv(csv, rows);
      detail::emit(fig1_out, csv.str(), detail::manifest_for(*fig1, "experiment fig1", fig1_seed));
    };
  });

  CLI::App *fig2 = experiment_cmd->add_subcommand("fig2", "Exact-recovery curves on a grid");
  std::string fig2_grid = "4x16";
  std::string fig2_p;
  std::string fig2_k = "0,1,2";
  int fig2_trials = 30;
  std::uint64_t fig2_seed = 0;
  std::string fig2_out;
  std::optional<double> fig2_q;
  bool fig2_fixed_truth = false;
  int fig2_threads = 1;
  std::string fig2_config;
  fig2->add_option("--grid", fig2_grid, "ROWSxCOLS")->default_val("4x16");
  fig2->add_option("--p", fig2_p, "Edge noise values: START:STOP:STEP or a comma list")->required();
  fig2->add_option("--k", fig2_k, "Constraint counts, subset of 0,1,2")->default_val("0,1,2");
  fig2->add_option("--trials", fig2_trials, "Observations per (p, k)")->default_val(30);
  fig2->add_option("--seed", fig2_seed, "PRNG seed")->required();
  fig2->add_option("--out", fig2_out, "Output CSV")->required();
  fig2->add_option("--q", fig2_q, "Node noise (default: q = p)");
  fig2->add_flag("--fixed-truth", fig2_fixed_truth, "Plant one y_bar shared by all trials");
  fig2->add_option("--threads", fig2_threads, "Worker threads")->default_val(1)->check(CLI::PositiveNumber);
  fig2->add_option("--config", fig2_config, "Solver config JSON");
  fig2->callback([&] {
    action = [&] {
      Fig2Config cfg;
      const auto dims = detail::split_params(fig2_grid);
      if (dims.size() != 2) throw InvalidArgument("--grid must be ROWSxCOLS");
      cfg.rows = detail::param_int(dims, 0, "ROWS");
      cfg.cols = detail::param_int(dims, 1, "COLS");
      cfg.p_values = parse_real_range(fig2_p);
      cfg.k_values = parse_int_range(fig2_k);
      cfg.trials = fig2_trials;
      cfg.seed = fig2_seed;
      cfg.q = fig2_q;
      cfg.fixed_truth = fig2_fixed_truth;
      cfg.threads = fig2_threads;
      if (!fig2_config.empty()) cfg.sdp = sdp_config_from_json(read_json_file(fig2_config));
      const auto rows = run_fig2(cfg);
      for (const auto &row : rows) {
        if (row.solver_failures > 0) {
          err << "warning: p=" << row.p << " k=" << row.k << ": " << row.solver_failures
              << " solver failures counted as non-recovery\n";
        }
      }
      std::ostringstream csv;
      write_fig2_csv(csv, rows);
      RunManifest manifest = detail::manifest_for(*fig2, "experiment fig2", fig2_seed);
      if (!fig2_q) manifest.parameters["--q"] = "p";
      detail::emit(fig2_out, csv.str(), manifest);
    };
  });

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidArguments;
  }

  try {
    if (action) action();
    return kOk;
  } catch (const InvalidArgument &e) {
    err << "error: " << e.what() << '\n';
    return kInvalidArguments;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}

}  // namespace fairrec::cli

#endif  // FAIRREC_CLI_HPP
