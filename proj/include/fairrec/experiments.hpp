#ifndef FAIRREC_EXPERIMENTS_HPP
#define FAIRREC_EXPERIMENTS_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "fairrec/error.hpp"
#include "fairrec/graph.hpp"
#include "fairrec/model.hpp"
#include "fairrec/random.hpp"
#include "fairrec/solver.hpp"
#include "fairrec/spectral.hpp"

namespace fairrec {

// ---------------------------------------------------------------------------
// Edge-probability specs for the Erdos-Renyi gap study.
//
//   "<number>"    fixed probability in [0, 1]
//   "2logn/n"     r = 2 ln(n) / n, clamped to 1
//   "2^(logn/n)"  r = 2^(ln(n) / n), clamped to 1 (literal alternative)

struct EdgeProbabilitySpec {
  enum class Kind { kFixed, kTwoLogNOverN, kTwoPowLogNOverN };
  Kind kind = Kind::kFixed;
  double fixed = 0.0;
  std::string text;

  double resolve(int n) const {
    const double nn = static_cast<double>(n);
    switch (kind) {
      case Kind::kFixed:
        return fixed;
      case Kind::kTwoLogNOverN:
        return n <= 1 ? 1.0 : std::min(1.0, 2.0 * std::log(nn) / nn);
      case Kind::kTwoPowLogNOverN:
        return n <= 1 ? 1.0 : std::min(1.0, std::pow(2.0, std::log(nn) / nn));
    }
    return fixed;
  }
};

namespace detail {

inline std::optional<double> parse_double(std::string_view text) {
  double value = 0.0;
  const char *first = text.data();
  const char *last = first + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

inline std::optional<long long> parse_int(std::string_view text) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

inline std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Shortest round-trip decimal form, independent of the C locale.
inline std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace detail

inline EdgeProbabilitySpec parse_edge_probability_spec(std::string_view text) {
  EdgeProbabilitySpec spec;
  spec.text = std::string(text);
  if (text == "2logn/n") {
    spec.kind = EdgeProbabilitySpec::Kind::kTwoLogNOverN;
  } else if (text == "2^(logn/n)") {
    spec.kind = EdgeProbabilitySpec::Kind::kTwoPowLogNOverN;
  } else {
    const auto value = detail::parse_double(text);
    if (!value || !(*value >= 0.0 && *value <= 1.0)) {
      throw InvalidArgument("edge probability spec must be a number in [0, 1], '2logn/n' or "
                            "'2^(logn/n)', got '" + std::string(text) + "'");
    }
    spec.fixed = *value;
  }
  return spec;
}

// "a:b:s" expands to a, a+s, ... up to b inclusive (values rounded to 12
// decimals); "x,y,z" is an explicit list; a single number is a list of one.
inline std::vector<double> parse_real_range(std::string_view text) {
  const auto parts = detail::split(text, ':');
  std::vector<double> out;
  if (parts.size() == 3) {
    const auto lo = detail::parse_double(parts[0]);
    const auto hi = detail::parse_double(parts[1]);
    const auto step = detail::parse_double(parts[2]);
    if (!lo || !hi || !step || *step <= 0 || *hi < *lo) {
      throw InvalidArgument("bad range '" + std::string(text) + "', expected start:stop:step");
    }
    const long long count = static_cast<long long>(std::floor((*hi - *lo) / *step + 1e-9)) + 1;
    for (long long i = 0; i < count; ++i) {
      out.push_back(std::round((*lo + i * *step) * 1e12) / 1e12);
    }
    return out;
  }
  if (parts.size() != 1) throw InvalidArgument("bad range '" + std::string(text) + "'");
  for (auto item : detail::split(text, ',')) {
    const auto v = detail::parse_double(item);
    if (!v) throw InvalidArgument("bad number '" + std::string(item) + "' in list");
    out.push_back(*v);
  }
  return out;
}

inline std::vector<int> parse_int_range(std::string_view text) {
  const auto parts = detail::split(text, ':');
  std::vector<int> out;
  if (parts.size() == 3) {
    const auto lo = detail::parse_int(parts[0]);
    const auto hi = detail::parse_int(parts[1]);
    const auto step = detail::parse_int(parts[2]);
    if (!lo || !hi || !step || *step <= 0 || *hi < *lo) {
      throw InvalidArgument("bad range '" + std::string(text) + "', expected start:stop:step");
    }
    for (long long v = *lo; v <= *hi; v += *step) out.push_back(static_cast<int>(v));
    return out;
  }
  if (parts.size() != 1) throw InvalidArgument("bad range '" + std::string(text) + "'");
  for (auto item : detail::split(text, ',')) {
    const auto v = detail::parse_int(item);
    if (!v) throw InvalidArgument("bad integer '" + std::string(item) + "' in list");
    out.push_back(static_cast<int>(*v));
  }
  return out;
}

namespace detail {

// Runs body(i) for i in [0, count) on up to `threads` workers. Each index
// is processed exactly once; callers write results into per-index slots.
template <typename Body>
void parallel_for(int count, int threads, Body &&body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> workers;
    for (int w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (int i = w; i < count; i += threads) body(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
}

// Sub-seed stream tags.
inline constexpr std::uint64_t kTagGraph = 0x01;
inline constexpr std::uint64_t kTagTruth = 0x02;
inline constexpr std::uint64_t kTagAttributes = 0x03;
inline constexpr std::uint64_t kTagObservation = 0x04;

}  // namespace detail

// ---------------------------------------------------------------------------
// Eigen-gap statistics over Erdos-Renyi graphs.

struct GapStatsRow {
  int n = 0;
  std::string r_spec;
  double r_value = 0.0;
  int trials = 0;
  double prob_delta_positive = 0.0;
  double mean_delta = 0.0;
};

// Graph t for size n uses seed derive_seed({seed, kTagGraph, n, t}). The gap
// is taken on the Laplacian as drawn, connected or not.
inline std::vector<GapStatsRow> run_fig1(const std::vector<int> &n_values, std::string_view r_spec,
                                         int trials, std::uint64_t seed, int threads = 1) {
  detail::require(trials >= 1, "trials must be at least 1");
  const EdgeProbabilitySpec spec = parse_edge_probability_spec(r_spec);
  std::vector<int> sizes = n_values;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  std::vector<GapStatsRow> rows;
  for (int n : sizes) {
    detail::require(n >= 1, "graph sizes must be positive");
    const double r = spec.resolve(n);
    std::vector<double> gaps(trials);
    detail::parallel_for(trials, threads, [&](int t) {
      const Graph g = erdos_renyi(n, r, derive_seed({seed, detail::kTagGraph,
                                                     static_cast<std::uint64_t>(n),
                                                     static_cast<std::uint64_t>(t)}));
      gaps[t] = spectral_gap(laplacian_spectrum(g));
    });
    GapStatsRow row;
    row.n = n;
    row.r_spec = spec.text;
    row.r_value = r;
    row.trials = trials;
    int positive = 0;
    double sum = 0.0;
    for (double gap : gaps) {
      positive += gap > 0.0;
      sum += gap;
    }
    row.prob_delta_positive = static_cast<double>(positive) / trials;
    row.mean_delta = sum / trials;
    rows.push_back(row);
  }
  return rows;
}

inline void write_fig1_csv(std::ostream &out, const std::vector<GapStatsRow> &rows) {
  out << "n,r_spec,trials,prob_delta_positive,mean_delta\n";
  for (const auto &row : rows) {
    out << row.n << ',' << row.r_spec << ',' << row.trials << ','
        << detail::format_double(row.prob_delta_positive) << ','
        << detail::format_double(row.mean_delta) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Exact-recovery curves on grids with 0, 1 or 2 fairness constraints.

struct Fig2Config {
  int rows = 4;
  int cols = 16;
  std::vector<double> p_values;
  std::vector<int> k_values{0, 1, 2};
  int trials = 30;
  std::uint64_t seed = 0;
  // Node noise; unset means q = p for every p.
  std::optional<double> q;
  // Plant a single y_bar (and attribute set) shared by all trials instead of
  // resampling per trial.
  bool fixed_truth = false;
  SdpConfig sdp;
  int threads = 1;
};

struct RecoveryCurveRow {
  double p = 0.0;
  int k = 0;
  int trials = 0;
  double recovery_rate = 0.0;
  double certificate_rate = 0.0;
  int solver_failures = 0;  // exceptions, counted as non-recovery
  int iteration_caps = 0;
};

// Everything one (p, k, trial) cell produced; handed to the optional
// observer so tests can audit individual solves.
struct TrialRecord {
  double p = 0.0;
  int k = 0;
  int trial = 0;
  const Instance *instance = nullptr;
  const Observation *observation = nullptr;
  const SdpSolution *solution = nullptr;  // null when the solver threw
  bool recovered = false;
  bool certificate_holds = false;
  std::string error;
};

using TrialObserver = std::function<void(const TrialRecord &)>;

// Seeding: trial t plants y_bar from derive_seed({seed, kTagTruth, t}) and
// its attributes from derive_seed({seed, kTagAttributes, t}) (t = 0 for
// every trial when fixed_truth is set); the observation at p-index i uses
// derive_seed({seed, kTagObservation, i, t}). The k value is not part of any
// seed: all k share the same instance and observation, and the k-constraint
// solve uses the first k attributes.
inline std::vector<RecoveryCurveRow> run_fig2(const Fig2Config &cfg,
                                              const TrialObserver &observer = {}) {
  detail::require(cfg.rows >= 1 && cfg.cols >= 1, "grid dimensions must be positive");
  detail::require(cfg.rows * cfg.cols <= 400, "grid larger than the dense solver budget (400)");
  detail::require(cfg.trials >= 1, "trials must be at least 1");
  detail::require(!cfg.p_values.empty() && !cfg.k_values.empty(), "empty p or k sweep");
  for (double p : cfg.p_values) detail::require(p >= 0.0 && p < 0.5, "p must lie in [0, 0.5)");
  if (cfg.q) detail::require(*cfg.q >= 0.0 && *cfg.q < 0.5, "q must lie in [0, 0.5)");
  for (int k : cfg.k_values) detail::require(k >= 0 && k <= 2, "k must be 0, 1 or 2");
  validate(cfg.sdp);

  const Graph g = grid(cfg.rows, cfg.cols);
  const int n = g.vertex_count();
  const int max_k = *std::max_element(cfg.k_values.begin(), cfg.k_values.end());
  const int np = static_cast<int>(cfg.p_values.size());
  const int nk = static_cast<int>(cfg.k_values.size());

  struct Cell {
    bool recovered = false;
    bool certified = false;
    bool failed = false;
    bool capped = false;
  };
  std::vector<Cell> cells(static_cast<std::size_t>(np) * nk * cfg.trials);
  auto cell_at = [&](int pi, int ki, int t) -> Cell & {
    return cells[(static_cast<std::size_t>(pi) * nk + ki) * cfg.trials + t];
  };
  std::mutex observer_mutex;

  detail::parallel_for(cfg.trials, cfg.threads, [&](int t) {
    const std::uint64_t plant = cfg.fixed_truth ? 0 : static_cast<std::uint64_t>(t);
    Labels y_bar = sample_labels(n, derive_seed({cfg.seed, detail::kTagTruth, plant}));
    auto attributes =
        sample_fair_attributes(y_bar, max_k, derive_seed({cfg.seed, detail::kTagAttributes, plant}));
    const Instance inst = make_instance(g, std::move(y_bar), std::move(attributes));

    for (int pi = 0; pi < np; ++pi) {
      const double p = cfg.p_values[pi];
      const double q = cfg.q.value_or(p);
      const Observation obs =
          observe(inst, p, q,
                  derive_seed({cfg.seed, detail::kTagObservation, static_cast<std::uint64_t>(pi),
                               static_cast<std::uint64_t>(t)}));
      for (int ki = 0; ki < nk; ++ki) {
        const int k = cfg.k_values[ki];
        const std::span<const Eigen::VectorXd> active(inst.attributes.data(), k);
        Cell &cell = cell_at(pi, ki, t);
        TrialRecord record{p, k, t, &inst, &obs, nullptr, false, false, {}};
        std::optional<SdpSolution> sol;
        try {
          sol = solve_sdp(obs.x, active, cfg.sdp);
          const Labels y_hat = round_solution(*sol, obs.c);
          cell.recovered = check_exact_recovery(y_hat, inst.y_bar);
          cell.capped = !sol->converged();
          cell.certified = dual_certificate(obs.x, active, inst.y_bar).holds;
          record.solution = &*sol;
        } catch (const Error &e) {
          cell.failed = true;
          cell.recovered = false;
          record.error = e.what();
        }
        record.recovered = cell.recovered;
        record.certificate_holds = cell.certified;
        if (observer) {
          std::lock_guard lock(observer_mutex);
          observer(record);
        }
      }
    }
  });

  std::vector<RecoveryCurveRow> rows;
  for (int pi = 0; pi < np; ++pi) {
    for (int ki = 0; ki < nk; ++ki) {
      RecoveryCurveRow row;
      row.p = cfg.p_values[pi];
      row.k = cfg.k_values[ki];
      row.trials = cfg.trials;
      int recovered = 0;
      int certified = 0;
      for (int t = 0; t < cfg.trials; ++t) {
        const Cell &cell = cell_at(pi, ki, t);
        recovered += cell.recovered;
        certified += cell.certified;
        row.solver_failures += cell.failed;
        row.iteration_caps += cell.capped;
      }
      row.recovery_rate = static_cast<double>(recovered) / cfg.trials;
      row.certificate_rate = static_cast<double>(certified) / cfg.trials;
      rows.push_back(row);
    }
  }
  std::sort(rows.begin(), rows.end(), [](const auto &a, const auto &b) {
    return a.p != b.p ? a.p < b.p : a.k < b.k;
  });
  return rows;
}

inline void write_fig2_csv(std::ostream &out, const std::vector<RecoveryCurveRow> &rows) {
  out << "p,k,trials,recovery_rate,certificate_rate\n";
  for (const auto &row : rows) {
    out << detail::format_double(row.p) << ',' << row.k << ',' << row.trials << ','
        << detail::format_double(row.recovery_rate) << ','
        << detail::format_double(row.certificate_rate) << '\n';
  }
}

// Mean recovery rate over the p sweep for one k.
inline double sweep_average(const std::vector<RecoveryCurveRow> &rows, int k) {
  double sum = 0.0;
  int count = 0;
  for (const auto &row : rows) {
    if (row.k == k) {
      sum += row.recovery_rate;
      ++count;
    }
  }
  detail::require(count > 0, "no rows for k = " + std::to_string(k));
  return sum / count;
}

}  // namespace fairrec

#endif  // FAIRREC_EXPERIMENTS_HPP
