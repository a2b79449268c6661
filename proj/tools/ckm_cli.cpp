// Command-line surface: instance generation, solving, validation, oracle
// comparison and benchmarking for connected k-median problems.
//
// Exit codes: 0 success, 1 infeasible input or failed validation,
//             2 usage error, 3 internal invariant violation.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "ckm/assign.hpp"
#include "ckm/centers.hpp"
#include "ckm/generators.hpp"
#include "ckm/json_io.hpp"
#include "ckm/oracle.hpp"
#include "ckm/tree_dp.hpp"

using namespace ckm;
using nlohmann::json;

namespace {

double env_tolerance() {
  if (const char* raw = std::getenv("CKM_TOL")) {
    char* end = nullptr;
    double v = std::strtod(raw, &end);
    if (end != raw && v > 0) return v;
    std::cerr << "warning: ignoring malformed CKM_TOL\n";
  }
  return 1e-9;
}

Instance<double> load_instance(const std::string& path, double tol) {
  std::ifstream in(path);
  if (!in) throw contract_error("cannot open instance file: " + path);
  json j;
  in >> j;
  return instance_from_json(j, tol);
}

json clusters_json(const Clustering& clustering) {
  return to_json(clustering)["clusters"];
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
  }
};

json trace_json(const FindCentersResult<double>& r) {
  json t;
  t["centers"] = r.half.centers;
  t["final_centers"] = r.final_centers;
  json env = json::object();
  for (const auto& [c, nodes] : r.half.environment)
    env[std::to_string(c)] = nodes;
  t["environments"] = env;
  json shifts = json::array();
  for (const auto& ev : r.half.trace)
    shifts.push_back({{"source", ev.source},
                      {"via", ev.via},
                      {"target", ev.target},
                      {"amount", ev.amount},
                      {"distance", ev.distance}});
  t["shifts"] = shifts;
  json radii = json::array();
  for (int v = 0; v < r.half.radii.radius.size(); ++v)
    radii.push_back(r.half.radii.radius[v]);
  t["radii"] = radii;
  t["fully_open"] = r.split.fully_open;
  t["half_open"] = r.split.half_open;
  json succ = json::object();
  for (const auto& [c, s] : r.split.successor) succ[std::to_string(c)] = s;
  t["successors"] = succ;
  t["opened_half"] = r.opened_half;
  json z = json::array();
  for (int v = 0; v < r.z.rows(); ++v) {
    json row = json::array();
    for (int c = 0; c < r.z.cols(); ++c) row.push_back(r.z(v, c));
    z.push_back(row);
  }
  t["z"] = z;
  t["audit"] = r.half.audit;
  return t;
}

int run_solve(const std::string& in_path, const std::string& variant,
              std::vector<int> centers_flag, const std::string& trace_path,
              bool trim, const std::string& dump_lp_path, double tol) {
  auto inst = load_instance(in_path, tol);
  std::vector<int> centers;
  if (!centers_flag.empty())
    centers = centers_flag;
  else if (inst.fixed_centers)
    centers = *inst.fixed_centers;

  json out;
  out["variant"] = variant;
  json stats;
  stats["n"] = inst.n;
  stats["k"] = inst.k;
  Timer timer;

  if (!dump_lp_path.empty()) {
    std::ofstream lp_out(dump_lp_path);
    if (!centers.empty())
      write_lp_format(build_flow_assignment_lp(inst, centers).lp, lp_out);
    else
      write_lp_format(build_flow_center_lp(inst, inst.k).lp, lp_out);
  }

  if (variant == "nd-assignment") {
    if (centers.empty())
      throw contract_error("nd-assignment needs centers (flag or instance)");
    AssignOptions<double> opts;
    opts.trim = trim;
    auto r = assign_non_disjoint(inst, centers, opts);
    out["cost"] = r.cost;
    out["lp_value"] = r.lp_value;
    out["clusters"] = clusters_json(r.clustering);
    json terminals = json::object();
    for (const auto& [c, t] : r.terminal_sets) terminals[std::to_string(c)] = t;
    stats["terminal_sets"] = terminals;
  } else if (variant == "nd-full") {
    auto r = find_centers(inst, inst.k);
    out["cost"] = r.assignment.cost;
    out["lp_value"] = r.assignment.lp_value;
    out["clusters"] = clusters_json(r.assignment.clustering);
    stats["shifts"] = r.half.trace.size();
    stats["chosen_centers"] = r.half.centers.size();
    stats["final_centers"] = r.final_centers;
    if (!r.half.audit.empty() || !r.split.audit.empty()) {
      for (const auto& a : r.half.audit) std::cerr << "audit: " << a << "\n";
      for (const auto& a : r.split.audit) std::cerr << "audit: " << a << "\n";
      throw invariant_violation("online audit reported violations");
    }
    if (!trace_path.empty()) {
      std::ofstream t(trace_path);
      t << trace_json(r).dump(2) << "\n";
    }
  } else if (variant == "disjoint-tree") {
    auto r = inst.fixed_centers || !centers.empty()
                 ? solve_tree(inst, inst.k, centers)
                 : solve_tree(inst, inst.k);
    out["cost"] = r.cost;
    out["clusters"] = clusters_json(r.clustering);
    stats["operations"] = r.operations;
  } else if (variant == "oracle-disjoint") {
    auto r = centers.empty()
                 ? brute_force_disjoint(inst, inst.k)
                 : brute_force_disjoint(inst, inst.k, centers);
    out["cost"] = r.cost;
    out["clusters"] = clusters_json(r.clustering);
  } else if (variant == "oracle-nd") {
    auto r = centers.empty()
                 ? brute_force_non_disjoint(inst, inst.k)
                 : brute_force_non_disjoint(inst, inst.k, centers);
    out["cost"] = r.cost;
    out["clusters"] = clusters_json(r.clustering);
  } else {
    std::cerr << "unknown variant: " << variant << "\n";
    return 2;
  }

  stats["millis"] = timer.ms();
  out["stats"] = stats;
  std::cout << out.dump(2) << "\n";
  std::cerr << "solved " << in_path << " [" << variant
            << "]: cost = " << out["cost"].get<double>() << " in "
            << stats["millis"].get<double>() << " ms\n";
  return 0;
}

int run_generate(const std::string& kind, const std::string& out_path,
                 const std::string& cnf_path, int m, double epsilon,
                 const std::string& source_path, int n, int k,
                 std::uint64_t seed, const std::string& model, double p) {
  Instance<double> inst;
  if (kind == "3sat") {
    if (cnf_path.empty()) throw contract_error("3sat generation needs --cnf");
    std::ifstream in(cnf_path);
    if (!in) throw contract_error("cannot open cnf file: " + cnf_path);
    auto cnf = parse_dimacs(in);
    inst = epsilon > 0 ? gen_from_3sat(cnf, m, epsilon) : gen_from_3sat(cnf, m);
  } else if (kind == "domset") {
    if (source_path.empty()) throw contract_error("domset generation needs --source");
    std::ifstream in(source_path);
    if (!in) throw contract_error("cannot open source graph: " + source_path);
    json j;
    in >> j;
    EdgeList edges;
    for (const auto& e : j.at("edges"))
      edges.push_back({e[0].get<int>(), e[1].get<int>()});
    inst = gen_from_dominating_set(j.at("n").get<int>(), edges);
  } else if (kind == "star") {
    inst = gen_star(n, seed);
  } else if (kind == "random") {
    GraphModel gm = model == "tree"   ? GraphModel::tree
                    : model == "grid" ? GraphModel::grid
                                      : GraphModel::gnp;
    inst = gen_random(n, k, seed, gm, p);
  } else {
    std::cerr << "unknown kind: " << kind << "\n";
    return 2;
  }
  std::ofstream out(out_path);
  if (!out) throw contract_error("cannot open output file: " + out_path);
  out << to_json(inst).dump(2) << "\n";
  std::cerr << "wrote " << kind << " instance (n = " << inst.n << ") to "
            << out_path << "\n";
  return 0;
}

int run_validate(const std::string& in_path, const std::string& sol_path,
                 const std::string& variant, double tol) {
  auto inst = load_instance(in_path, tol);
  std::ifstream sin(sol_path);
  if (!sin) throw contract_error("cannot open solution file: " + sol_path);
  json sj;
  sin >> sj;
  auto clustering = clustering_from_json(sj);
  Variant v = variant == "disjoint" ? Variant::disjoint : Variant::non_disjoint;
  auto report = validate(inst, clustering, v);
  json out = to_json(report);
  out["cost"] = report.feasible() ? evaluate_cost(inst, clustering) : -1.0;
  std::cout << out.dump(2) << "\n";
  if (!report.feasible()) {
    for (const auto& viol : report.violations)
      std::cerr << "violation [" << to_string(viol.kind) << "] " << viol.detail
                << "\n";
    return 1;
  }
  std::cerr << "solution is feasible\n";
  return 0;
}

int run_compare(const std::string& in_path, double tol) {
  auto inst = load_instance(in_path, tol);
  json out;
  Timer timer;
  double algorithm_cost, oracle_cost;
  if (inst.fixed_centers) {
    auto algo = assign_non_disjoint(inst, *inst.fixed_centers);
    auto oracle = brute_force_non_disjoint(inst, inst.k, inst.fixed_centers);
    algorithm_cost = algo.cost;
    oracle_cost = oracle.cost;
    out["lp_value"] = algo.lp_value;
  } else {
    auto algo = find_centers(inst, inst.k);
    auto oracle = brute_force_non_disjoint(inst, inst.k);
    algorithm_cost = algo.assignment.cost;
    oracle_cost = oracle.cost;
    out["lp_value"] = algo.assignment.lp_value;
  }
  out["algorithm_cost"] = algorithm_cost;
  out["oracle_cost"] = oracle_cost;
  out["ratio"] = oracle_cost > 0 ? algorithm_cost / oracle_cost
                                 : (algorithm_cost > 0 ? -1.0 : 1.0);
  out["millis"] = timer.ms();
  std::cout << out.dump(2) << "\n";
  std::cerr << "ratio vs oracle: " << out["ratio"].get<double>() << "\n";
  return 0;
}

struct BenchRow {
  std::string name;
  int n, k;
  double cost, reference, ratio, millis;
};

int run_bench(const std::string& suite, int threads) {
  struct Job {
    std::string name;
    std::function<BenchRow()> run;
  };
  std::vector<Job> jobs;

  if (suite == "small") {
    for (int i = 0; i < 10; ++i)
      jobs.push_back({"small_" + std::to_string(i), [i]() {
        auto inst = gen_random(5 + i % 2, 2, 40 + i);
        Timer t;
        auto algo = find_centers(inst, 2);
        auto oracle = brute_force_non_disjoint(inst, 2);
        return BenchRow{"small_" + std::to_string(i), inst.n, 2,
                        algo.assignment.cost, oracle.cost,
                        algo.assignment.cost / std::max(oracle.cost, 1e-12),
                        t.ms()};
      }});
  } else if (suite == "trees") {
    for (int i = 0; i < 12; ++i)
      jobs.push_back({"tree_" + std::to_string(i), [i]() {
        int n = 6 + i % 4;
        int k = 1 + i % 3;
        auto inst = gen_random(n, k, 90 + i, GraphModel::tree);
        Timer t;
        auto dp = solve_tree(inst, k);
        auto oracle = brute_force_disjoint(inst, k);
        return BenchRow{"tree_" + std::to_string(i), n, k, dp.cost,
                        oracle.cost,
                        oracle.cost > 0 ? dp.cost / oracle.cost : 1.0, t.ms()};
      }});
  } else if (suite == "reductions") {
    std::vector<std::pair<std::string, CnfFormula>> formulas = {
        {"sat_a2", {2, {{1, 2}, {-1, -2}}}},
        {"unsat_a2", {2, {{1, 2}, {1, -2}, {-1, 2}, {-1, -2}}}},
        {"sat_a3", {3, {{1, 2, 3}, {-1, -2, -3}}}},
    };
    for (auto& [name, cnf] : formulas)
      jobs.push_back({name, [name = name, cnf = cnf]() {
        auto inst = gen_from_3sat(cnf, 2);
        Timer t;
        auto r = brute_force_disjoint(inst, 2);
        double reference = 2.0 * cnf.num_vars;  // satisfiable target
        return BenchRow{name, inst.n, 2, r.cost, reference,
                        r.cost / reference, t.ms()};
      }});
    for (int n = 2; n <= 4; ++n)
      jobs.push_back({"domset_path_" + std::to_string(n), [n]() {
        EdgeList edges;
        for (int v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1});
        auto inst = gen_from_dominating_set(n, edges);
        Timer t;
        auto r = brute_force_non_disjoint(inst, 2, inst.fixed_centers);
        int ds = brute_force_dominating_set(n, edges);
        return BenchRow{"domset_path_" + std::to_string(n), inst.n, 2, r.cost,
                        double(ds), r.cost / std::max(1, ds), t.ms()};
      }});
  } else {
    std::cerr << "unknown suite: " << suite << "\n";
    return 2;
  }

  std::vector<BenchRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      rows[i] = jobs[i].run();
    }
  };
  std::vector<std::thread> pool;
  int width = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
  for (int t = 0; t < width; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::cout << "name,n,k,cost,reference,ratio,millis\n";
  for (const auto& row : rows)
    std::cout << row.name << "," << row.n << "," << row.k << "," << row.cost
              << "," << row.reference << "," << row.ratio << "," << row.millis
              << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"connected k-median toolkit"};
  app.require_subcommand(1);
  double tol = env_tolerance();

  auto* gen = app.add_subcommand("generate", "construct an instance file");
  std::string kind, out_path = "instance.json", cnf_path, source_path,
              model = "gnp";
  int m = 2, gn = 8, gk = 2;
  std::uint64_t seed = 1;
  double epsilon = 0, p = 0.5;
  gen->add_option("--kind", kind, "3sat | domset | star | random")->required();
  gen->add_option("--out", out_path, "output instance path");
  gen->add_option("--cnf", cnf_path, "DIMACS CNF input (3sat)");
  gen->add_option("--m", m, "gadget copies (3sat)");
  gen->add_option("--epsilon", epsilon, "replace zero distances (3sat)");
  gen->add_option("--source", source_path, "source graph json (domset)");
  gen->add_option("--n", gn, "node count (star, random)");
  gen->add_option("--k", gk, "cluster budget (random)");
  gen->add_option("--seed", seed, "rng seed");
  gen->add_option("--model", model, "gnp | tree | grid (random)");
  gen->add_option("--p", p, "edge probability (gnp)");

  auto* solve = app.add_subcommand("solve", "run a solver on an instance");
  std::string in_path, variant, trace_path, dump_lp_path;
  std::vector<int> centers_flag;
  bool trim = false;
  solve->add_option("--in", in_path, "instance json")->required();
  solve
      ->add_option("--variant", variant,
                   "nd-assignment | nd-full | disjoint-tree | "
                   "oracle-disjoint | oracle-nd")
      ->required();
  solve->add_option("--centers", centers_flag, "fixed centers")
      ->delimiter(',');
  solve->add_option("--trace", trace_path, "write stage artifacts (nd-full)");
  solve->add_flag("--trim", trim, "overlap trim post-pass (nd-assignment)");
  solve->add_option("--dump-lp", dump_lp_path, "write the LP in text form");

  auto* val = app.add_subcommand("validate", "check a solution file");
  std::string sol_path, val_variant = "non-disjoint";
  std::string val_in;
  val->add_option("--in", val_in, "instance json")->required();
  val->add_option("--solution", sol_path, "solution json")->required();
  val->add_option("--variant", val_variant, "disjoint | non-disjoint");

  auto* cmp = app.add_subcommand("compare", "algorithm versus oracle");
  std::string cmp_in;
  cmp->add_option("--in", cmp_in, "instance json")->required();

  auto* bench = app.add_subcommand("bench", "run a benchmark suite (CSV)");
  std::string suite = "small";
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  bench->add_option("--suite", suite, "small | trees | reductions");
  bench->add_option("--threads", threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen)
      return run_generate(kind, out_path, cnf_path, m, epsilon, source_path,
                          gn, gk, seed, model, p);
    if (*solve)
      return run_solve(in_path, variant, centers_flag, trace_path, trim,
                       dump_lp_path, tol);
    if (*val) return run_validate(val_in, sol_path, val_variant, tol);
    if (*cmp) return run_compare(cmp_in, tol);
    if (*bench) return run_bench(suite, threads);
  } catch (const invariant_violation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const infeasible_error& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 1;
  } catch (const contract_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const solver_error& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
