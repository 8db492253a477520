// uflow: command-line front end. Every subcommand reads and writes the text
// formats of instance_io.hpp; errors go to stderr with exit status 1.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "uflow/annealing.hpp"
#include "uflow/bench.hpp"
#include "uflow/instance_gen.hpp"
#include "uflow/instance_io.hpp"
#include "uflow/lp_model.hpp"
#include "uflow/rounding.hpp"
#include "uflow/theory.hpp"

namespace {

using namespace uflow;

void write_to(const std::string& file, const std::function<void(std::ostream&)>& body) {
  if (file.empty() || file == "-") {
    body(std::cout);
    return;
  }
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file);
  body(out);
}

void print_metrics(std::ostream& out, const Instance& inst, const Metrics& m) {
  out << "overflow_sum " << format_number(m.overflow_sum) << '\n'
      << "overflow_ratio " << format_number(inst.total_demand() > 0 ? m.overflow_sum / inst.total_demand() : 0.0) << '\n'
      << "congestion " << format_number(m.congestion) << '\n';
}

struct GenOptions {
  int n = 10;
  int nodes = 50;
  double degree = 5.0;
  double origin_probability = 0.1;
  std::string origin_links = "replacement";
  std::uint64_t seed = 0;
  double capacity = 1e4;
  int max_demand = 1500;
  bool no_witness = false;
  std::string output;
};

struct SolveOptions {
  std::string algo = "srr";
  std::optional<int> theta;
  double beta = 1.1;
  std::string objective = "overflow";
  std::string order;
  std::uint64_t seed = 0;
  std::optional<std::int64_t> iterations;
  int k_paths = 10;
  std::string input, output;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsplittable multicommodity flow toolkit: generators, LP relaxation, randomized rounding, annealing, bounds"};
  app.require_subcommand(1);

  // gen
  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate an instance with a zero-overflow witness");
  gen_cmd->require_subcommand(1);
  auto add_common_gen = [&](CLI::App* c) {
    c->add_option("--seed", gen.seed, "generator seed");
    c->add_option("--capacity", gen.capacity, "capacity of every arc")->check(CLI::PositiveNumber);
    c->add_option("--max-demand", gen.max_demand, "largest commodity demand")->check(CLI::PositiveNumber);
    c->add_flag("--no-witness", gen.no_witness, "omit the witness block");
    c->add_option("-o,--output", gen.output, "instance file (default stdout)");
  };
  auto* gen_grid = gen_cmd->add_subcommand("grid", "n x n torus plus n origin nodes");
  gen_grid->add_option("--n", gen.n, "grid side")->check(CLI::Range(2, 1000));
  gen_grid->add_option("--origin-links", gen.origin_links,
                       "replacement: 2n draws with repeats collapsed; distinct: 2n distinct grid nodes")
      ->check(CLI::IsMember({"replacement", "distinct"}));
  add_common_gen(gen_grid);
  auto* gen_random = gen_cmd->add_subcommand("random", "strongly connected random digraph");
  gen_random->add_option("--nodes", gen.nodes, "node count")->check(CLI::Range(2, 1000000));
  gen_random->add_option("--degree", gen.degree, "target mean out-degree");
  gen_random->add_option("--origin-probability", gen.origin_probability, "chance that a node is an origin");
  add_common_gen(gen_random);

  // solve
  SolveOptions so;
  auto* solve_cmd = app.add_subcommand("solve", "route every commodity on one path");
  solve_cmd->add_option("--algo", so.algo, "rr | rr-sorted | srr | srr-unsorted | csrr | sa");
  solve_cmd->add_option("--theta", so.theta, "split commodities fixed between re-solves (default ceil(|V|/4))");
  solve_cmd->add_option("--beta", so.beta, "csrr row slack factor (>= 1)");
  solve_cmd->add_option("--objective", so.objective, "relaxation objective: overflow | congestion | mixed");
  solve_cmd->add_option("--order", so.order, "decreasing | input | shuffled (default follows --algo)");
  solve_cmd->add_option("--seed", so.seed, "run seed");
  solve_cmd->add_option("--iterations", so.iterations, "sa iterations (default ceil(2|K|^1.5))");
  solve_cmd->add_option("--k-paths", so.k_paths, "sa candidate paths per commodity");
  solve_cmd->add_option("-i,--input", so.input, "instance file")->required();
  solve_cmd->add_option("-o,--output", so.output, "solution file (default stdout)");

  // bound
  BoundQuery bq;
  std::optional<double> bound_beta;
  auto* bound_cmd = app.add_subcommand("bound", "approximation factor 1 + alpha for a failure probability");
  bound_cmd->add_option("--arcs", bq.arc_count, "arc count |E|")->required();
  bound_cmd->add_option("--epsilon", bq.epsilon, "failure probability in (0, 1)")->required();
  bound_cmd->add_option("--gamma", bq.gamma, "granularity D_max / (c_min delta*)")->required();
  bound_cmd->add_option("--beta", bound_beta, "relaxed csrr rows factor");

  // tailcheck
  std::string tail_input;
  TailConfig tc;
  auto* tail_cmd = app.add_subcommand("tailcheck", "Monte Carlo check of the per-arc tail bound");
  tail_cmd->add_option("-i,--input", tail_input, "instance file")->required();
  tail_cmd->add_option("--alpha", tc.alphas, "one or more alpha values")->required();
  tail_cmd->add_option("--runs", tc.runs, "csrr runs");
  tail_cmd->add_option("--seed", tc.seed, "base seed");
  tail_cmd->add_option("--beta", tc.beta, "csrr row slack factor");
  tail_cmd->add_option("--jobs", tc.jobs, "worker threads");

  // bench
  std::string spec_file;
  std::optional<std::string> out_dir;
  int jobs = 1;
  bool quiet = false;
  auto* bench_cmd = app.add_subcommand("bench", "run an experiment spec and write CSV and SVG reports");
  bench_cmd->add_option("--spec", spec_file, "experiment spec file")->required();
  bench_cmd->add_option("--out", out_dir, "output directory (default $UFLOW_OUT_DIR, else ./results)");
  bench_cmd->add_option("--jobs", jobs, "worker threads");
  bench_cmd->add_flag("--quiet", quiet, "no progress on stderr");

  // validate / eval / export-lp
  std::string io_input, solution_file, lp_objective = "overflow", lp_output;
  auto* validate_cmd = app.add_subcommand("validate", "check instance invariants (and the witness)");
  validate_cmd->add_option("-i,--input", io_input, "instance file")->required();
  auto* eval_cmd = app.add_subcommand("eval", "metrics of a solution file");
  eval_cmd->add_option("-i,--input", io_input, "instance file")->required();
  eval_cmd->add_option("-s,--solution", solution_file, "solution file")->required();
  auto* export_cmd = app.add_subcommand("export-lp", "write the relaxation in the LP text format");
  export_cmd->add_option("-i,--input", io_input, "instance file")->required();
  export_cmd->add_option("--objective", lp_objective, "overflow | congestion");
  export_cmd->add_option("-o,--output", lp_output, "LP file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_cmd->parsed()) {
      Instance inst;
      if (gen_grid->parsed()) {
        inst = generate_grid(GridSpec{.n = gen.n, .seed = gen.seed, .capacity = gen.capacity,
                                      .max_demand = gen.max_demand,
                                      .origin_links = gen.origin_links == "distinct" ? OriginLinks::kDistinct
                                                                         : OriginLinks::kWithReplacement});
      } else {
        inst = generate_random_connected(RandomGraphSpec{.node_count = gen.nodes, .average_degree = gen.degree,
                                                         .origin_probability = gen.origin_probability,
                                                         .seed = gen.seed, .capacity = gen.capacity,
                                                         .max_demand = gen.max_demand});
      }
      if (gen.no_witness) inst.witness.reset();
      write_to(gen.output, [&](std::ostream& o) { write_instance(o, inst); });
      std::cerr << "nodes " << inst.graph.node_count() << " arcs " << inst.graph.arc_count() << " commodities "
                << inst.commodity_count() << '\n';
    } else if (solve_cmd->parsed()) {
      const Instance inst = load_instance(so.input);
      PathAssignment assignment;
      Metrics metrics;
      if (so.algo == "sa") {
        const SaResult r = run_sa(inst, SaConfig{.k_paths = so.k_paths, .iterations = so.iterations, .seed = so.seed});
        assignment = r.assignment;
        metrics = r.metrics;
        std::cerr << "iterations " << r.iterations << " accepted " << r.accepted << '\n';
      } else {
        RoundingConfig rc;
        rc.variant = parse_variant(so.algo);
        rc.theta = so.theta;
        rc.beta = so.beta;
        rc.objective = parse_objective(so.objective);
        rc.seed = so.seed;
        if (so.order == "decreasing") rc.order = OrderRule::kDecreasingDemand;
        else if (so.order == "input") rc.order = OrderRule::kInput;
        else if (so.order == "shuffled") rc.order = OrderRule::kShuffled;
        else if (!so.order.empty()) throw Error("unknown order '" + so.order + "'");
        const RoundingResult r = run_rounding(inst, rc);
        assignment = r.assignment;
        metrics = r.metrics;
        std::cerr << "lp_solves " << r.lp_solves << " lp_iterations " << r.lp_iterations << " delta_star "
                  << format_number(r.delta_star) << '\n';
      }
      write_to(so.output, [&](std::ostream& o) { write_solution(o, assignment, metrics, inst.total_demand()); });
      if (!so.output.empty() && so.output != "-") print_metrics(std::cout, inst, metrics);
    } else if (bound_cmd->parsed()) {
      bq.beta = bound_beta;
      const BoundReport r = approximation_bound(bq);
      std::cout << "B " << format_number(r.b) << '\n'
                << "alpha " << format_number(r.alpha) << '\n'
                << "one_plus_alpha " << format_number(1.0 + r.alpha) << '\n';
      if (bq.beta) std::cout << "factor " << format_number(r.factor) << '\n';
    } else if (tail_cmd->parsed()) {
      const Instance inst = load_instance(tail_input);
      const TailResult r = monte_carlo_tail(inst, tc);
      std::cout << "d_max " << format_number(r.d_max) << " delta_star " << format_number(r.delta_star) << " runs "
                << r.runs_completed << '/' << r.runs_requested << (r.complete ? "" : " (partial)") << '\n';
      if (!r.complete) std::cerr << "error: " << r.error << '\n';
      std::cout << "alpha,arc,threshold,exceedances,frequency,bound,within_slack\n";
      bool all_within = true;
      for (const TailReport& rep : r.reports) {
        for (const TailArc& a : rep.arcs) {
          const double slack = r.runs_completed > 0 ? 3.0 * std::sqrt(a.bound / r.runs_completed) : 0.0;
          const bool ok = a.frequency <= a.bound + slack;
          all_within = all_within && ok;
          std::cout << format_number(rep.alpha) << ',' << a.arc << ',' << format_number(a.threshold) << ','
                    << a.exceedances << ',' << format_number(a.frequency) << ',' << format_number(a.bound) << ','
                    << (ok ? "yes" : "no") << '\n';
        }
      }
      return r.complete && all_within ? 0 : 1;
    } else if (bench_cmd->parsed()) {
      const bench::ExperimentSpec spec = bench::load_spec(spec_file);
      bench::RunOptions opts;
      opts.jobs = jobs;
      if (!quiet) {
        opts.progress = [](int done, int total) {
          std::fprintf(stderr, "\r%d/%d runs", done, total);
          if (done == total) std::fputc('\n', stderr);
        };
      }
      const bench::ResultTable table = bench::run_experiment(spec, opts);
      const auto dir = bench::output_dir(out_dir ? std::optional<std::filesystem::path>(*out_dir) : std::nullopt);
      int failed = 0;
      for (const auto& row : table.rows) failed += !row.error.empty();
      for (const auto& f : bench::emit_report(table, dir)) std::cout << f.string() << '\n';
      if (failed > 0) std::cerr << failed << " run(s) failed; see the error column\n";
    } else if (validate_cmd->parsed()) {
      const Instance inst = load_instance(io_input);
      const auto problems = validate_instance(inst);
      for (const auto& p : problems) std::cout << p << '\n';
      if (problems.empty()) {
        std::cout << "ok: nodes " << inst.graph.node_count() << " arcs " << inst.graph.arc_count()
                  << " commodities " << inst.commodity_count();
        if (inst.witness) {
          std::cout << " witness overflow " << format_number(evaluate(inst, PathAssignment{*inst.witness}).overflow_sum);
        }
        std::cout << '\n';
      }
      return problems.empty() ? 0 : 1;
    } else if (eval_cmd->parsed()) {
      const Instance inst = load_instance(io_input);
      std::ifstream in(solution_file);
      if (!in) throw Error("cannot open " + solution_file);
      print_metrics(std::cout, inst, evaluate(inst, read_solution(in, inst.commodity_count())));
    } else if (export_cmd->parsed()) {
      const Instance inst = load_instance(io_input);
      const Objective obj = parse_objective(lp_objective);
      if (obj == Objective::kMixed) throw Error("export-lp: the mixed objective is two LPs; export each stage");
      const Relaxation rel = build_relaxation(inst, {}, RelaxationConfig{obj, std::nullopt});
      write_to(lp_output, [&](std::ostream& o) { lp::export_text(o, rel.problem); });
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
