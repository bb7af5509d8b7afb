// vorcvp: lattice generation, preprocessing, solving and crossing-count
// experiments. Exit codes: 0 ok, 2 bad input, 3 size cap, 4 internal.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vorcvp/cvpp.hpp"
#include "vorcvp/experiment.hpp"
#include "vorcvp/generators.hpp"
#include "vorcvp/io.hpp"
#include "vorcvp/oracles.hpp"

using namespace vorcvp;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  unsigned precision_bits = 128;
  int dim_cap = 14;
  std::uint64_t enum_cap = 10'000'000;
  std::string out;
  std::string format;
  bool check = false;
  unsigned threads = 0;

  Limits limits() const {
    if (dim_cap < 1) throw InputError("--dim-cap must be positive");
    return Limits{dim_cap, enum_cap};
  }

  Json to_json() const {
    return Json{{"seed", seed}, {"precision_bits", precision_bits}, {"dim_cap", dim_cap}, {"enum_cap", enum_cap}};
  }
};

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    write_text_file(g.out, text);
  }
}

std::string format_or(const Globals& g, const char* fallback) {
  const std::string f = g.format.empty() ? fallback : g.format;
  if (f != "csv" && f != "json") throw InputError("--format must be csv or json");
  return f;
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out + '\n';
}

LatticeBasis load_basis(const std::string& path, const Limits& limits) {
  LatticeBasis b = read_basis_file(path);
  if (static_cast<int>(b.dim()) > limits.dim_cap)
    throw SizeError("dimension " + std::to_string(b.dim()) + " exceeds --dim-cap " + std::to_string(limits.dim_cap));
  return b;
}

// Uses the VR cache when it exists, otherwise computes and (if a path was
// given) writes it.
VoronoiCellData load_cell(const LatticeBasis& basis, const std::string& cache, const Limits& limits) {
  if (!cache.empty() && std::filesystem::exists(cache)) return vr_cache_from_json(basis, read_json_file(cache));
  VoronoiCellData cell = compute_relevant_vectors(basis, limits);
  if (!cache.empty()) write_text_file(cache, vr_cache_to_json(cell).dump() + "\n");
  return cell;
}

Vec load_target(const std::string& text, const std::string& file) {
  if (!text.empty() && !file.empty()) throw InputError("give either --target or --target-file");
  if (!file.empty()) return target_from_json(read_json_file(file));
  if (text.empty()) throw InputError("a target is required (--target or --target-file)");
  return parse_vector_text(text);
}

IntVec parse_coeffs(const std::string& text) {
  IntVec a;
  for (const auto& s : parse_vector_text(text)) {
    if (s.get_den() != 1) throw InputError("lattice coefficients must be integers");
    a.push_back(to_int64(s.get_num()));
  }
  return a;
}

std::optional<SamplerMethod> parse_method(const std::string& s) {
  if (s.empty() || s == "auto") return std::nullopt;
  if (s == "rejection") return SamplerMethod::rejection;
  if (s == "hit-and-run" || s == "hit_and_run") return SamplerMethod::hit_and_run;
  throw InputError("unknown sampler '" + s + "' (auto, rejection, hit-and-run)");
}

RunManifest make_manifest(const Globals& g, const LatticeBasis& basis, Json config) {
  RunManifest m;
  m.seed = g.seed;
  m.timestamp = RunManifest::now_utc();
  m.inputs["basis"] = basis_hash(basis);
  config["globals"] = g.to_json();
  m.config = std::move(config);
  return m;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// gen

struct GenArgs {
  std::string kind;
  std::size_t n = 2;
  std::int64_t num_range = 4;
  std::int64_t den_bound = 4;
  std::string input;
};

void cmd_gen(const Globals& g, const GenArgs& a) {
  const Limits limits = g.limits();
  LatticeBasis basis;
  if (a.kind == "integer-identity" || a.kind == "identity") {
    if (a.n < 1 || static_cast<int>(a.n) > limits.dim_cap) throw SizeError("n outside 1..dim-cap");
    basis = LatticeBasis::identity(a.n);
  } else if (a.kind == "random-rational") {
    basis = random_rational_basis(a.n, g.seed, RandomBasisParams{a.num_range, a.den_bound}, limits);
  } else if (a.kind == "from-file") {
    if (a.input.empty()) throw InputError("from-file needs --in");
    basis = load_basis(a.input, limits);  // rank is checked on construction
  } else {
    throw InputError("unknown kind '" + a.kind + "' (integer-identity, random-rational, from-file)");
  }
  emit(g, basis_to_string(basis));
}

// preprocess

struct PreprocessArgs {
  std::string basis;
  std::string cache;
};

void cmd_preprocess(const Globals& g, const PreprocessArgs& a) {
  const Limits limits = g.limits();
  const LatticeBasis basis = load_basis(a.basis, limits);
  const auto t0 = std::chrono::steady_clock::now();
  const PreprocessedLattice pre = preprocess(basis, limits);
  const double wall = ms_since(t0);
  const std::string cache = a.cache.empty() ? a.basis + ".vr.json" : a.cache;
  write_text_file(cache, vr_cache_to_json(pre.cell).dump() + "\n");

  const std::size_t n = pre.dim();
  const std::size_t cap = 2 * ((std::size_t{1} << n) - 1);
  const auto radii = sandwich_radii(pre.cell);
  const RunManifest m = make_manifest(g, basis, Json{{"command", "preprocess"}});
  if (format_or(g, "json") == "csv") {
    emit(g, csv_line({"manifest", "lattice", "n", "vr_count", "vr_bound", "vr_bound_ok", "lambda1_sq", "mu_upper_sq",
                      "wall_ms"}) +
                csv_line({m.hash(), basis_hash(basis), std::to_string(n), std::to_string(pre.cell.size()),
                          std::to_string(cap), pre.cell.size() <= cap ? "true" : "false",
                          to_string(pre.cell.lambda1_sq()), to_string(pre.mu_upper_sq), fmt_double(wall)}));
    return;
  }
  Json j;
  j["manifest"] = m.to_json();
  j["lattice"] = basis_hash(basis);
  j["n"] = n;
  j["vr_count"] = pre.cell.size();
  j["vr_bound"] = cap;
  j["vr_bound_ok"] = pre.cell.size() <= cap;
  j["lambda1_sq"] = to_string(pre.cell.lambda1_sq());
  j["max_vr_norm_sq"] = to_string(pre.cell.max_vr_norm_sq());
  j["mu_upper_sq"] = to_string(pre.mu_upper_sq);
  j["inner_radius_sq"] = to_string(radii.inner_sq);
  j["outer_radius_sq"] = to_string(radii.outer_sq);
  j["bits_basis"] = pre.bits_basis;
  j["vr_cache"] = cache;
  j["wall_ms"] = wall;
  emit(g, j.dump(2) + "\n");
}

// solve

struct SolveArgs {
  std::string basis;
  std::string target;
  std::string target_file;
  std::string vr;
  std::string strategy = "rsl";
  std::string sampler;
  std::string trace;
  double restart_constant = 8.0;
  std::size_t restart_cap = 64;
};

int cmd_solve(const Globals& g, const SolveArgs& a) {
  const Limits limits = g.limits();
  const LatticeBasis basis = load_basis(a.basis, limits);
  const Vec t = load_target(a.target, a.target_file);
  if (t.size() != basis.dim()) throw InputError("target dimension does not match the lattice");
  const Strategy strategy = parse_strategy(a.strategy);
  const PreprocessedLattice pre = preprocess_cell(load_cell(basis, a.vr, limits));

  const auto t0 = std::chrono::steady_clock::now();
  Json j;
  LatticePoint y;
  PathTrace trace;
  const LatticePoint x = round_to_start(pre, t);
  const QueryParams qp = query_params(pre, t, a.restart_constant);
  j["strategy"] = strategy_name(strategy);
  switch (strategy) {
    case Strategy::rsl: {
      SolverConfig cfg;
      cfg.sampler.seed = g.seed;
      cfg.sampler.precision_bits = g.precision_bits;
      cfg.sampler.method = parse_method(a.sampler);
      cfg.restart_constant = a.restart_constant;
      cfg.restart_cap = a.restart_cap;
      SolveResult r = query(pre, t, cfg);
      y = r.y;
      trace = std::move(r.trace);
      j["restarts"] = r.restarts;
      j["ties"] = r.ties;
      j["truncations"] = r.truncations;
      j["uncertified_attempts"] = r.uncertified;
      j["total_edges"] = r.total_edges;
      j["sampler"] = method_name(cfg.sampler.resolved_method(pre.dim()));
      break;
    }
    case Strategy::slicer: {
      const SlicerResult r = iterative_slicer(pre.cell, t, x);
      y = r.y;
      j["steps"] = r.steps;
      break;
    }
    case Strategy::mv: {
      MvResult r = mv_walk(pre.cell, t, x, TiePolicy::lexicographic);
      y = r.y;
      trace = std::move(r.trace);
      break;
    }
    case Strategy::deterministic_line: {
      RslResult r = randomized_straight_line(pre.cell, x, t, zeros(pre.dim()), Scalar(1), SIZE_MAX,
                                             TiePolicy::lexicographic);
      y = r.y;
      trace = std::move(r.trace);
      break;
    }
  }
  const double wall = ms_since(t0);
  const bool certified = certify(pre, t, y);
  const Scalar dist_sq = norm_sq(sub(t, y.coords));

  Json config{{"command", "solve"}, {"target", vec_to_json(t)}, {"strategy", strategy_name(strategy)},
              {"restart_constant", a.restart_constant}, {"restart_cap", a.restart_cap}};
  const RunManifest m = make_manifest(g, basis, config);
  j["y"] = lattice_point_to_json(y);
  j["dist_sq"] = to_string(dist_sq);
  j["certified"] = certified;
  j["start"] = lattice_point_to_json(x);
  j["start_distance_v"] = to_string(voronoi_norm(pre.cell, sub(t, x.coords)));
  j["phase_b"] = trace.phase_b;
  j["phase_c"] = trace.phase_c;
  j["edges"] = trace.edges();
  j["alpha"] = to_string(qp.alpha);
  j["qbar"] = qp.qbar.get_str();
  j["edge_threshold"] = qp.edge_threshold;
  j["bits_basis"] = pre.bits_basis;
  j["bits_target"] = qp.bits_target;
  j["seed"] = g.seed;
  j["wall_ms"] = wall;
  bool match = true;
  if (g.check) {
    const CvpSolutionSet oracle = cvp_bruteforce(basis, t, limits);
    match = oracle.dist_sq == dist_sq;
    j["oracle_dist_sq"] = to_string(oracle.dist_sq);
    j["oracle_minimizers"] = oracle.minimizers.size();
    j["oracle_match"] = match;
  }
  j["manifest"] = m.to_json();
  if (!a.trace.empty()) write_text_file(a.trace, trace_to_jsonl(pre.cell, trace));

  if (format_or(g, "json") == "csv") {
    std::vector<std::string> head{"manifest", "lattice", "strategy", "y", "dist_sq", "certified",
                                  "phase_b",  "phase_c", "seed"};
    std::vector<std::string> row{m.hash(), basis_hash(basis), strategy_name(strategy), join_ints(y.coeffs),
                                 to_string(dist_sq), certified ? "true" : "false", std::to_string(trace.phase_b),
                                 std::to_string(trace.phase_c), std::to_string(g.seed)};
    if (g.check) {
      head.push_back("oracle_match");
      row.push_back(match ? "true" : "false");
    }
    emit(g, csv_line(head) + csv_line(row));
  } else {
    emit(g, j.dump(2) + "\n");
  }
  if (!certified || !match) {
    std::cerr << "vorcvp: answer failed verification\n";
    return 4;
  }
  return 0;
}

// crossings

struct CrossingsArgs {
  std::string basis;
  std::string target;
  std::string target_file;
  std::string start;
  std::string alpha;
  std::string vr;
  std::string strategy = "rsl";
  std::string sampler = "rejection";
  std::size_t trials = 100;
  std::size_t step_budget = 0;
};

void cmd_crossings(const Globals& g, const CrossingsArgs& a) {
  const Limits limits = g.limits();
  const LatticeBasis basis = load_basis(a.basis, limits);
  const PreprocessedLattice pre = preprocess_cell(load_cell(basis, a.vr, limits));
  CrossingsConfig cfg;
  cfg.lattice_id = basis_hash(basis);
  cfg.target = load_target(a.target, a.target_file);
  if (!a.start.empty()) cfg.start = parse_coeffs(a.start);
  if (!a.alpha.empty()) cfg.alpha = parse_scalar(a.alpha);
  cfg.trials = a.trials;
  cfg.seed = g.seed;
  cfg.strategy = parse_strategy(a.strategy);
  cfg.sampler.seed = g.seed;
  cfg.sampler.precision_bits = g.precision_bits;
  cfg.sampler.method = parse_method(a.sampler);
  cfg.sampler.step_budget = a.step_budget;
  cfg.threads = g.threads;

  const std::vector<ExperimentRecord> rows = run_crossings(pre, cfg);
  const RunManifest m = make_manifest(g, basis, cfg.to_json());
  if (format_or(g, "csv") == "csv") {
    emit(g, crossings_csv(rows, m.hash()));
    if (!g.out.empty()) write_text_file(g.out + ".manifest.json", m.to_json().dump(2) + "\n");
  } else {
    emit(g, crossings_json(rows, m).dump(2) + "\n");
  }
  if (!rows.empty()) {
    const CrossingsSummary s = summarize(rows);
    const bool exploratory = cfg.strategy == Strategy::rsl &&
                             cfg.sampler.resolved_method(pre.dim()) != SamplerMethod::rejection;
    std::fprintf(stderr, "phase B mean %.4f (se %.4f) bound %.4f: %s\n", s.mean_b, s.se_b, s.bound_b,
                 s.ok_b ? "satisfied" : "violated");
    std::fprintf(stderr, "phase C mean %.4f (se %.4f) bound %.4f: %s%s\n", s.mean_c, s.se_c, s.bound_c,
                 s.ok_c ? "satisfied" : "violated", exploratory ? " (exploratory: approximate sampler)" : "");
  }
}

// graphdist

struct GraphdistArgs {
  std::string basis;
  std::string vr;
  std::string pairs = "exhaustive";
  std::vector<std::string> pair;
  std::size_t cap = 6;
  std::size_t count = 100;
  std::int64_t range = 2;
};

void cmd_graphdist(const Globals& g, const GraphdistArgs& a) {
  const Limits limits = g.limits();
  const LatticeBasis basis = load_basis(a.basis, limits);
  const VoronoiCellData cell = load_cell(basis, a.vr, limits);
  GraphdistConfig cfg;
  cfg.lattice_id = basis_hash(basis);
  cfg.cap = a.cap;
  cfg.random_pairs = a.count;
  cfg.coeff_range = a.range;
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  if (!a.pair.empty()) {
    cfg.mode = PairsMode::explicit_list;
    for (const auto& p : a.pair) {
      const auto semi = p.find(';');
      if (semi == std::string::npos) throw InputError("--pair expects \"x1,..,xn;y1,..,yn\"");
      cfg.pairs.emplace_back(parse_coeffs(p.substr(0, semi)), parse_coeffs(p.substr(semi + 1)));
    }
  } else if (a.pairs == "exhaustive") {
    cfg.mode = PairsMode::exhaustive;
  } else if (a.pairs == "random") {
    cfg.mode = PairsMode::random;
  } else {
    throw InputError("--pairs must be exhaustive or random (or use --pair)");
  }
  const std::vector<GraphRecord> rows = run_graphdist(cell, cfg);
  const RunManifest m = make_manifest(g, basis, cfg.to_json());
  if (format_or(g, "csv") == "csv") {
    emit(g, graphdist_csv(rows, cell.dim(), cfg.lattice_id, m.hash()));
    if (!g.out.empty()) write_text_file(g.out + ".manifest.json", m.to_json().dump(2) + "\n");
  } else {
    emit(g, graphdist_json(rows, m).dump(2) + "\n");
  }
  std::size_t bad = 0, beyond = 0;
  for (const auto& r : rows) {
    if (!r.d_g) ++beyond;
    else if (!r.lower_ok || !r.upper_ok) ++bad;
  }
  std::fprintf(stderr, "%zu pairs, %zu beyond cap, %zu sandwich violations\n", rows.size(), beyond, bad);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Voronoi-cell closest vector solver and crossing-count experiments", "vorcvp"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "PRNG seed")->envname("VORCVP_SEED");
  app.add_option("--precision-bits", g.precision_bits, "fractional bits of sampled points")
      ->envname("VORCVP_PRECISION_BITS");
  app.add_option("--dim-cap", g.dim_cap, "largest dimension for exponential work")->envname("VORCVP_DIM_CAP");
  app.add_option("--enum-cap", g.enum_cap, "largest enumeration box")->envname("VORCVP_ENUM_CAP");
  app.add_option("--out", g.out, "output file (default stdout)")->envname("VORCVP_OUT");
  app.add_option("--format", g.format, "csv or json")->envname("VORCVP_FORMAT");
  app.add_flag("--check", g.check, "cross-check answers against brute force")->envname("VORCVP_CHECK");
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)")->envname("VORCVP_THREADS");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "write a basis file");
  gen_cmd->add_option("kind", gen.kind, "integer-identity | random-rational | from-file")->required();
  gen_cmd->add_option("-n,--n", gen.n, "dimension");
  gen_cmd->add_option("--num-range", gen.num_range, "numerators drawn from [-r, r]");
  gen_cmd->add_option("--den-bound", gen.den_bound, "denominators drawn from [1, d]");
  gen_cmd->add_option("--in", gen.input, "basis file for from-file");

  PreprocessArgs pp;
  auto* pp_cmd = app.add_subcommand("preprocess", "compute the relevant vectors and cache them");
  pp_cmd->add_option("basis", pp.basis, "basis file")->required();
  pp_cmd->add_option("--cache", pp.cache, "VR cache path (default <basis>.vr.json)");

  SolveArgs sv;
  auto* sv_cmd = app.add_subcommand("solve", "closest vector to a target");
  sv_cmd->add_option("basis", sv.basis, "basis file")->required();
  sv_cmd->add_option("--target", sv.target, "target, e.g. \"1/2,1/3\"");
  sv_cmd->add_option("--target-file", sv.target_file, "target file {\"t\": [...]}");
  sv_cmd->add_option("--vr", sv.vr, "VR cache (read if present, written otherwise)");
  sv_cmd->add_option("--strategy", sv.strategy, "rsl | slicer | mv | deterministic-line");
  sv_cmd->add_option("--sampler", sv.sampler, "auto | rejection | hit-and-run");
  sv_cmd->add_option("--trace", sv.trace, "write the crossing events as JSON lines");
  sv_cmd->add_option("--restart-constant", sv.restart_constant, "edge threshold as a multiple of the expected length");
  sv_cmd->add_option("--restart-cap", sv.restart_cap, "give up after this many restarts");

  CrossingsArgs cx;
  auto* cx_cmd = app.add_subcommand("crossings", "phase-B / phase-C crossing statistics");
  cx_cmd->add_option("basis", cx.basis, "basis file")->required();
  cx_cmd->add_option("--target", cx.target, "target, e.g. \"1,1,1,1\"");
  cx_cmd->add_option("--target-file", cx.target_file, "target file");
  cx_cmd->add_option("--start", cx.start, "coefficients of the start point x (default: rounded target)");
  cx_cmd->add_option("--alpha", cx.alpha, "phase-C truncation, e.g. 1/32 (default from the truncation rule)");
  cx_cmd->add_option("-N,--trials", cx.trials, "number of trials");
  cx_cmd->add_option("--vr", cx.vr, "VR cache");
  cx_cmd->add_option("--strategy", cx.strategy, "rsl | slicer | mv | deterministic-line");
  cx_cmd->add_option("--sampler", cx.sampler, "rejection (bound validation) | hit-and-run (exploratory) | auto");
  cx_cmd->add_option("--step-budget", cx.step_budget, "hit-and-run steps per sample (0 = default)");

  GraphdistArgs gd;
  auto* gd_cmd = app.add_subcommand("graphdist", "graph distance against the Voronoi norm");
  gd_cmd->add_option("basis", gd.basis, "basis file")->required();
  gd_cmd->add_option("--vr", gd.vr, "VR cache");
  gd_cmd->add_option("--pairs", gd.pairs, "exhaustive | random");
  gd_cmd->add_option("--pair", gd.pair, "explicit pair \"x1,..,xn;y1,..,yn\" (repeatable)");
  gd_cmd->add_option("--cap", gd.cap, "BFS depth cap");
  gd_cmd->add_option("--count", gd.count, "number of random pairs");
  gd_cmd->add_option("--range", gd.range, "random coefficients drawn from [-r, r]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen_cmd) cmd_gen(g, gen);
    else if (*pp_cmd) cmd_preprocess(g, pp);
    else if (*sv_cmd) return cmd_solve(g, sv);
    else if (*cx_cmd) cmd_crossings(g, cx);
    else if (*gd_cmd) cmd_graphdist(g, gd);
    return 0;
  } catch (const InputError& e) {
    std::cerr << "vorcvp: input error: " << e.what() << "\n";
    return 2;
  } catch (const SizeError& e) {
    std::cerr << "vorcvp: size cap exceeded: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "vorcvp: internal error: " << e.what() << "\n";
    return 4;
  }
}
