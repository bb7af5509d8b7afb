#pragma once

// Crossing-count and graph-distance experiments. Trials fan out over
// threads, each with its own PRNG stream keyed by (seed, trial), and rows
// are stored by trial index, so output is identical for any thread count.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "vorcvp/cvpp.hpp"
#include "vorcvp/errors.hpp"
#include "vorcvp/graph_oracle.hpp"
#include "vorcvp/io.hpp"
#include "vorcvp/navigation.hpp"
#include "vorcvp/random.hpp"
#include "vorcvp/sampling.hpp"
#include "vorcvp/voronoi.hpp"

#ifndef VORCVP_VERSION
#define VORCVP_VERSION "0.0.0"
#endif

namespace vorcvp {

inline constexpr const char* kVersion = VORCVP_VERSION;

enum class Strategy { rsl, slicer, mv, deterministic_line };

inline const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::rsl: return "rsl";
    case Strategy::slicer: return "slicer";
    case Strategy::mv: return "mv";
    case Strategy::deterministic_line: return "deterministic-line";
  }
  return "?";
}

inline Strategy parse_strategy(const std::string& s) {
  if (s == "rsl") return Strategy::rsl;
  if (s == "slicer") return Strategy::slicer;
  if (s == "mv") return Strategy::mv;
  if (s == "deterministic-line") return Strategy::deterministic_line;
  throw InputError("unknown strategy '" + s + "' (rsl, slicer, mv, deterministic-line)");
}

inline std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string join_scalars(std::span<const Scalar> v, char sep = ' ') {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += to_string(v[i]);
  }
  return out;
}

inline std::string join_ints(std::span<const std::int64_t> v, char sep = ' ') {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(v[i]);
  }
  return out;
}

struct RunManifest {
  Json config = Json::object();
  std::string version = kVersion;
  std::map<std::string, std::string> inputs;  // name -> content hash
  std::uint64_t seed = 0;
  std::string timestamp;

  static std::string now_utc() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }

  // Everything except the timestamp.
  Json reproducible_part() const {
    Json j;
    j["tool"] = "vorcvp";
    j["version"] = version;
    j["prng"] = Rng::kName;
    j["seed"] = seed;
    j["inputs"] = inputs;
    j["config"] = config;
    return j;
  }

  std::string hash() const { return fnv1a_hex(reproducible_part().dump()); }

  Json to_json() const {
    Json j = reproducible_part();
    j["timestamp"] = timestamp;
    j["hash"] = hash();
    return j;
  }
};

// f(i) for i in [0, count) on up to `threads` workers; results in index order.
template <class R, class F>
std::vector<R> parallel_map(std::size_t count, unsigned threads, F&& f) {
  std::vector<R> out(count);
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        out[i] = f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
        return;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

struct ExperimentRecord {
  std::string lattice_id;
  std::size_t n = 0;
  std::size_t trial = 0;
  Strategy strategy = Strategy::rsl;
  std::string sampler;
  Vec target;
  Scalar alpha;
  std::uint64_t seed = 0;
  std::size_t phase_b = 0;
  std::size_t phase_c = 0;
  double bound_b = 0;  // (n/2) |t - x|_V
  double bound_c = 0;  // K n (2 + ln(4/alpha))
  std::size_t resamples = 0;
  bool certified = false;
  double wall_ms = 0;
};

struct CrossingsConfig {
  std::string lattice_id;
  Vec target;
  std::optional<IntVec> start;  // coefficients of x; default rounds t
  std::optional<Scalar> alpha;  // default 1 / (4 qbar mu_upper)^2
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::rsl;
  SamplerConfig sampler;
  unsigned threads = 0;
  std::size_t resample_cap = 64;

  Json to_json() const {
    Json j;
    j["command"] = "crossings";
    j["target"] = vec_to_json(target);
    j["start"] = start ? coeffs_to_json(*start) : Json(nullptr);
    j["alpha"] = alpha ? Json(to_string(*alpha)) : Json(nullptr);
    j["trials"] = trials;
    j["strategy"] = strategy_name(strategy);
    j["precision_bits"] = sampler.precision_bits;
    j["sampler"] = sampler.method ? Json(method_name(*sampler.method)) : Json(nullptr);
    j["step_budget"] = sampler.step_budget;
    j["tv_epsilon"] = sampler.tv_epsilon;
    j["resample_cap"] = resample_cap;
    return j;
  }
};

struct CrossingsSummary {
  std::size_t trials = 0;
  double mean_b = 0, se_b = 0, mean_c = 0, se_c = 0;
  double bound_b = 0, bound_c = 0;
  bool ok_b = true, ok_c = true;
  std::size_t resamples = 0;
  std::size_t certified = 0;
};

inline std::pair<double, double> mean_and_se(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = ss / static_cast<double>(xs.size() - 1);
  return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

// Verdict: satisfied iff mean <= bound + 3 SE.
inline CrossingsSummary summarize(const std::vector<ExperimentRecord>& rows) {
  CrossingsSummary s;
  s.trials = rows.size();
  if (rows.empty()) return s;
  std::vector<double> b, c;
  for (const auto& r : rows) {
    b.push_back(static_cast<double>(r.phase_b));
    c.push_back(static_cast<double>(r.phase_c));
    s.resamples += r.resamples;
    s.certified += r.certified ? 1 : 0;
  }
  std::tie(s.mean_b, s.se_b) = mean_and_se(b);
  std::tie(s.mean_c, s.se_c) = mean_and_se(c);
  s.bound_b = rows.front().bound_b;
  s.bound_c = rows.front().bound_c;
  s.ok_b = s.mean_b <= s.bound_b + 3 * s.se_b;
  s.ok_c = s.mean_c <= s.bound_c + 3 * s.se_c;
  return s;
}

namespace detail {

inline ExperimentRecord crossings_trial(const PreprocessedLattice& pre, const CrossingsConfig& cfg,
                                        const LatticePoint& x, const Scalar& alpha, double bound_b,
                                        double bound_c, std::size_t trial) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& cell = pre.cell;
  ExperimentRecord rec;
  rec.lattice_id = cfg.lattice_id;
  rec.n = pre.dim();
  rec.trial = trial;
  rec.strategy = cfg.strategy;
  rec.target = cfg.target;
  rec.alpha = alpha;
  rec.seed = cfg.seed;
  rec.bound_b = bound_b;
  rec.bound_c = bound_c;
  rec.sampler = "none";

  switch (cfg.strategy) {
    case Strategy::rsl: {
      rec.sampler = method_name(cfg.sampler.resolved_method(pre.dim()));
      Rng rng = Rng::stream(cfg.seed, trial);
      for (;;) {
        const Vec z = sample_voronoi(cell, cfg.sampler, rng);
        try {
          const RslResult run = randomized_straight_line(cell, x, cfg.target, z, alpha, SIZE_MAX);
          rec.phase_b = run.trace.phase_b;
          rec.phase_c = run.trace.phase_c;
          rec.certified = run.certified;
          break;
        } catch (const TieDetected&) {
          if (++rec.resamples > cfg.resample_cap) throw RestartCapExceeded("too many ties in crossings trial");
        }
      }
      break;
    }
    case Strategy::slicer: {
      const SlicerResult r = iterative_slicer(cell, cfg.target, x);
      rec.phase_b = r.steps;
      rec.certified = membership(cell, sub(cfg.target, r.y.coords));
      break;
    }
    case Strategy::mv: {
      const MvResult r = mv_walk(cell, cfg.target, x, TiePolicy::lexicographic);
      rec.phase_b = r.trace.edges();
      rec.certified = membership(cell, sub(cfg.target, r.y.coords));
      break;
    }
    case Strategy::deterministic_line: {
      const RslResult r = randomized_straight_line(cell, x, cfg.target, zeros(pre.dim()), Scalar(1), SIZE_MAX,
                                                   TiePolicy::lexicographic);
      rec.phase_b = r.trace.phase_b;
      rec.phase_c = r.trace.phase_c;
      rec.certified = r.certified;
      break;
    }
  }
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

}  // namespace detail

inline std::vector<ExperimentRecord> run_crossings(const PreprocessedLattice& pre, const CrossingsConfig& cfg) {
  if (cfg.target.size() != pre.dim()) throw InputError("target dimension does not match the lattice");
  cfg.sampler.validate();
  const LatticePoint x = cfg.start ? LatticePoint::from_coeffs(pre.basis(), *cfg.start) : round_to_start(pre, cfg.target);
  if (x.coeffs.size() != pre.dim()) throw InputError("start dimension does not match the lattice");
  const Scalar alpha = cfg.alpha ? *cfg.alpha : query_params(pre, cfg.target).alpha;
  if (alpha <= 0 || alpha > 1) throw InputError("alpha must lie in (0, 1]");
  const double bound_b = phase_b_bound(pre.dim(), voronoi_norm(pre.cell, sub(cfg.target, x.coords)));
  const double bound_c = phase_c_bound(pre.dim(), alpha);
  return parallel_map<ExperimentRecord>(cfg.trials, cfg.threads, [&](std::size_t i) {
    return detail::crossings_trial(pre, cfg, x, alpha, bound_b, bound_c, i);
  });
}

inline const char* kCrossingsHeader =
    "manifest,lattice,n,trial,strategy,sampler,target,alpha,seed,phase_b,phase_c,bound_b,bound_c,"
    "resamples,certified,wall_ms,se_b,se_c,verdict_b,verdict_c";

// Per-trial rows, then one summary row (omitted when there are no trials).
inline std::string crossings_csv(const std::vector<ExperimentRecord>& rows, const std::string& manifest_hash) {
  std::string out = kCrossingsHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += manifest_hash + ',' + r.lattice_id + ',' + std::to_string(r.n) + ',' + std::to_string(r.trial) + ',' +
           strategy_name(r.strategy) + ',' + r.sampler + ',' + join_scalars(r.target) + ',' + to_string(r.alpha) +
           ',' + std::to_string(r.seed) + ',' + std::to_string(r.phase_b) + ',' + std::to_string(r.phase_c) + ',' +
           fmt_double(r.bound_b) + ',' + fmt_double(r.bound_c) + ',' + std::to_string(r.resamples) + ',' +
           (r.certified ? "true" : "false") + ',' + fmt_double(r.wall_ms) + ",,,,\n";
  }
  if (!rows.empty()) {
    const CrossingsSummary s = summarize(rows);
    const auto& f = rows.front();
    double wall = 0;
    for (const auto& r : rows) wall += r.wall_ms;
    out += manifest_hash + ',' + f.lattice_id + ',' + std::to_string(f.n) + ",summary," +
           strategy_name(f.strategy) + ',' + f.sampler + ',' + join_scalars(f.target) + ',' + to_string(f.alpha) +
           ',' + std::to_string(f.seed) + ',' + fmt_double(s.mean_b) + ',' + fmt_double(s.mean_c) + ',' +
           fmt_double(s.bound_b) + ',' + fmt_double(s.bound_c) + ',' + std::to_string(s.resamples) + ',' +
           std::to_string(s.certified) + ',' + fmt_double(wall) + ',' + fmt_double(s.se_b) + ',' +
           fmt_double(s.se_c) + ',' + (s.ok_b ? "satisfied" : "violated") + ',' +
           (s.ok_c ? "satisfied" : "violated") + '\n';
  }
  return out;
}

inline Json crossings_json(const std::vector<ExperimentRecord>& rows, const RunManifest& manifest) {
  Json j;
  j["manifest"] = manifest.to_json();
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json e;
    e["trial"] = r.trial;
    e["strategy"] = strategy_name(r.strategy);
    e["sampler"] = r.sampler;
    e["phase_b"] = r.phase_b;
    e["phase_c"] = r.phase_c;
    e["resamples"] = r.resamples;
    e["certified"] = r.certified;
    e["wall_ms"] = r.wall_ms;
    arr.push_back(std::move(e));
  }
  j["records"] = std::move(arr);
  const CrossingsSummary s = summarize(rows);
  Json sum;
  sum["trials"] = s.trials;
  if (!rows.empty()) {
    sum["lattice"] = rows.front().lattice_id;
    sum["n"] = rows.front().n;
    sum["target"] = vec_to_json(rows.front().target);
    sum["alpha"] = to_string(rows.front().alpha);
  }
  sum["mean_phase_b"] = s.mean_b;
  sum["se_phase_b"] = s.se_b;
  sum["bound_phase_b"] = s.bound_b;
  sum["verdict_phase_b"] = s.ok_b ? "satisfied" : "violated";
  sum["mean_phase_c"] = s.mean_c;
  sum["se_phase_c"] = s.se_c;
  sum["bound_phase_c"] = s.bound_c;
  sum["verdict_phase_c"] = s.ok_c ? "satisfied" : "violated";
  sum["resamples"] = s.resamples;
  sum["certified"] = s.certified;
  j["summary"] = std::move(sum);
  return j;
}

// Graph distance against the Voronoi norm.

enum class PairsMode { exhaustive, random, explicit_list };

struct GraphdistConfig {
  std::string lattice_id;
  std::size_t cap = 6;
  PairsMode mode = PairsMode::exhaustive;
  std::size_t random_pairs = 100;
  std::int64_t coeff_range = 2;
  std::vector<std::pair<IntVec, IntVec>> pairs;  // explicit_list
  std::uint64_t seed = 0;
  unsigned threads = 0;

  Json to_json() const {
    Json j;
    j["command"] = "graphdist";
    j["cap"] = cap;
    j["mode"] = mode == PairsMode::exhaustive ? "exhaustive" : mode == PairsMode::random ? "random" : "explicit";
    j["random_pairs"] = random_pairs;
    j["coeff_range"] = coeff_range;
    Json p = Json::array();
    for (const auto& [x, y] : pairs) p.push_back(Json::array({coeffs_to_json(x), coeffs_to_json(y)}));
    j["pairs"] = std::move(p);
    return j;
  }
};

struct GraphRecord {
  IntVec x, y;
  std::optional<std::size_t> d_g;  // nullopt: beyond the BFS cap
  Scalar norm_v;
  bool lower_ok = false;  // |x-y|_V / 2 <= d_G
  bool upper_ok = false;  // d_G <= (n/2) |x-y|_V
  bool lower_tight = false;
  bool upper_tight = false;
};

inline GraphRecord graph_record(const VoronoiCellData& cell, IntVec x, IntVec y, std::optional<std::size_t> d) {
  GraphRecord r;
  const LatticePoint px = LatticePoint::from_coeffs(cell.basis(), std::move(x));
  const LatticePoint py = LatticePoint::from_coeffs(cell.basis(), std::move(y));
  r.norm_v = voronoi_norm(cell, sub(px.coords, py.coords));
  r.d_g = d;
  if (d) {
    const Scalar two_d(static_cast<long>(2 * *d));
    const Scalar n_norm = Scalar(static_cast<long>(cell.dim())) * r.norm_v;
    r.lower_ok = r.norm_v <= two_d;
    r.upper_ok = two_d <= n_norm;
    r.lower_tight = r.norm_v == two_d;
    r.upper_tight = two_d == n_norm;
  }
  r.x = px.coeffs;
  r.y = py.coeffs;
  return r;
}

inline std::vector<GraphRecord> run_graphdist(const VoronoiCellData& cell, const GraphdistConfig& cfg) {
  const std::size_t n = cell.dim();
  const IntVec origin(n, 0);
  switch (cfg.mode) {
    case PairsMode::exhaustive: {
      // Translation invariance: x = 0 and y over the whole BFS ball.
      const auto ball = graph_ball(cell, cfg.cap);
      std::vector<GraphRecord> out;
      for (std::size_t i = 1; i < ball.size(); ++i) out.push_back(graph_record(cell, origin, ball[i].first, ball[i].second));
      return out;
    }
    case PairsMode::random: {
      if (cfg.coeff_range < 0) throw InputError("coefficient range must be nonnegative");
      return parallel_map<GraphRecord>(cfg.random_pairs, cfg.threads, [&](std::size_t i) {
        Rng rng = Rng::stream(cfg.seed, i);
        const auto span = static_cast<std::uint64_t>(2 * cfg.coeff_range + 1);
        IntVec x(n), y(n);
        for (auto& v : x) v = static_cast<std::int64_t>(rng.below(span)) - cfg.coeff_range;
        for (auto& v : y) v = static_cast<std::int64_t>(rng.below(span)) - cfg.coeff_range;
        const auto d = graph_distance_bfs(cell, LatticePoint::from_coeffs(cell.basis(), x),
                                          LatticePoint::from_coeffs(cell.basis(), y), cfg.cap);
        return graph_record(cell, std::move(x), std::move(y), d);
      });
    }
    case PairsMode::explicit_list: {
      return parallel_map<GraphRecord>(cfg.pairs.size(), cfg.threads, [&](std::size_t i) {
        const auto& [x, y] = cfg.pairs[i];
        if (x.size() != n || y.size() != n) throw InputError("pair dimension does not match the lattice");
        const auto d = graph_distance_bfs(cell, LatticePoint::from_coeffs(cell.basis(), x),
                                          LatticePoint::from_coeffs(cell.basis(), y), cfg.cap);
        return graph_record(cell, x, y, d);
      });
    }
  }
  return {};
}

inline const char* kGraphdistHeader =
    "manifest,lattice,n,x,y,d_g,norm_v,lower_ok,upper_ok,lower_tight,upper_tight,status";

inline std::string graphdist_csv(const std::vector<GraphRecord>& rows, std::size_t n, const std::string& lattice_id,
                                 const std::string& manifest_hash) {
  std::string out = kGraphdistHeader;
  out += '\n';
  auto b = [](bool v) { return v ? "true" : "false"; };
  for (const auto& r : rows) {
    out += manifest_hash + ',' + lattice_id + ',' + std::to_string(n) + ',' + join_ints(r.x) + ',' + join_ints(r.y) +
           ',';
    if (r.d_g) {
      out += std::to_string(*r.d_g) + ',' + to_string(r.norm_v) + ',' + b(r.lower_ok) + ',' + b(r.upper_ok) + ',' +
             b(r.lower_tight) + ',' + b(r.upper_tight) + ",ok\n";
    } else {
      out += ',' + to_string(r.norm_v) + ",,,,,cap-exceeded\n";
    }
  }
  return out;
}

inline Json graphdist_json(const std::vector<GraphRecord>& rows, const RunManifest& manifest) {
  Json j;
  j["manifest"] = manifest.to_json();
  Json arr = Json::array();
  std::size_t violations = 0, beyond = 0;
  for (const auto& r : rows) {
    Json e;
    e["x"] = coeffs_to_json(r.x);
    e["y"] = coeffs_to_json(r.y);
    e["d_g"] = r.d_g ? Json(*r.d_g) : Json(nullptr);
    e["norm_v"] = to_string(r.norm_v);
    if (r.d_g) {
      e["lower_ok"] = r.lower_ok;
      e["upper_ok"] = r.upper_ok;
      e["lower_tight"] = r.lower_tight;
      e["upper_tight"] = r.upper_tight;
      if (!r.lower_ok || !r.upper_ok) ++violations;
    } else {
      ++beyond;
    }
    arr.push_back(std::move(e));
  }
  j["records"] = std::move(arr);
  j["summary"] = Json{{"pairs", rows.size()}, {"violations", violations}, {"cap_exceeded", beyond}};
  return j;
}

}  // namespace vorcvp
