#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "loclll/experiment.hpp"

using namespace loclll;
using nlohmann::json;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error("cannot parse " + path + ": " + e.what());
  }
}

void emit(const json& j, const std::string& out) {
  auto text = j.dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw Error("cannot write " + out);
  f << text;
}

json parse_params(const std::string& s) {
  if (s.empty()) return json::object();
  try {
    return json::parse(s);
  } catch (const json::exception& e) {
    throw Error(std::string("--params is not valid JSON: ") + e.what());
  }
}

VertexLabeling labeling_from_json(const json& j) {
  VertexLabeling f;
  const auto& src = j.contains("outputs") ? j.at("outputs") : j;
  for (const auto& [k, v] : src.items()) f[std::stoll(k)] = v.get<std::int64_t>();
  return f;
}

json assignment_json(const Assignment& a) {
  json out = json::object();
  for (auto [x, v] : a) out[std::to_string(x)] = v;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"loclll: LOCAL algorithms and Lovasz local lemma experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 0;
  int cap_bits = kDefaultCapBits;
  std::string out;
  app.add_option("--seed", seed, "root seed")->capture_default_str();
  app.add_option("--cap-enum-bits", cap_bits, "enumeration cap (log2)")->capture_default_str();
  app.add_option("--out", out, "output file (default stdout)");

  int exit_code = 0;

  // gen
  auto* gen = app.add_subcommand("gen", "generate a structured graph");
  std::string kind;
  GenerateParams gp;
  gen->add_option("--kind", kind, "path|cycle|directed_cycle|torus_grid|random_regular|random_tree")->required();
  gen->add_option("--n", gp.n);
  gen->add_option("--width", gp.width);
  gen->add_option("--height", gp.height);
  gen->add_option("--degree", gp.degree);
  gen->callback([&] { emit(generate(kind, gp, derive_seed(seed, "graph")).to_json(), out); });

  // run-local
  auto* run = app.add_subcommand("run-local", "run a builtin LOCAL algorithm");
  std::string graph_path, alg_name, params_str, ids_mode = "none";
  int rounds = -1;
  std::int64_t random_m = 0;
  bool do_verify = false;
  run->add_option("--graph", graph_path)->required();
  run->add_option("--alg", alg_name)->required();
  run->add_option("--params", params_str, "algorithm parameters as JSON");
  run->add_option("--rounds", rounds, "override the round count");
  run->add_option("--ids", ids_mode, "none|index|greedy: attach identifiers first")->capture_default_str();
  run->add_option("--random", random_m, "attach a uniform random layer over [m]");
  run->add_flag("--verify", do_verify, "check the output against the algorithm's problem");
  run->callback([&] {
    auto g = StructuredGraph::from_json(read_json(graph_path));
    auto bi = builtin_algorithm(alg_name, parse_params(params_str));
    int T = rounds >= 0 ? rounds : bi.rounds;
    auto gg = g;
    if (ids_mode == "index") {
      VertexLabeling ids;
      for (std::size_t i = 0; i < g.size(); ++i) ids[g.vertex_at(i)] = static_cast<std::int64_t>(i) + 1;
      gg = with_labeling(gg, ids, Layer::Id);
    } else if (ids_mode == "greedy") {
      gg = with_labeling(gg, greedy_coloring(power_graph(g, 2 * (T + bi.problem.t)), g.vertices()), Layer::Id);
    } else if (ids_mode != "none") {
      throw Error("--ids must be none, index or greedy");
    }
    if (random_m > 0) {
      auto rng = make_rng(seed, "run_local_random");
      VertexLabeling th;
      for (auto v : g.vertices()) th[v] = uniform_int(rng, 1, random_m);
      gg = with_labeling(gg, th, Layer::Random);
    }
    RunReport rep;
    rep.outputs = run_deterministic(bi.alg, gg, T, RunOptions{std::max<std::size_t>(kDefaultCanonicalCap, g.size())});
    rep.rounds_used = T;
    rep.valid = true;
    if (do_verify) {
      auto v = verify_lcl(bi.problem, g, rep.outputs, RunOptions{std::max<std::size_t>(kDefaultCanonicalCap, g.size())});
      rep.valid = v.valid;
      rep.violating_vertices = v.violating_vertices;
    }
    emit(rep.to_json(), out);
    if (!rep.valid) exit_code = 1;
  });

  // verify
  auto* ver = app.add_subcommand("verify", "verify a labeling against an LCL");
  std::string labeling_path, problem_name;
  ver->add_option("--graph", graph_path)->required();
  ver->add_option("--labels,--labeling", labeling_path)->required();
  ver->add_option("--problem", problem_name)->required();
  ver->add_option("--params", params_str);
  ver->callback([&] {
    auto g = StructuredGraph::from_json(read_json(graph_path));
    auto problem = make_problem(problem_name, parse_params(params_str));
    auto rep = verify_lcl(problem, g, labeling_from_json(read_json(labeling_path)),
                          RunOptions{std::max<std::size_t>(kDefaultCanonicalCap, g.size())});
    emit(rep.to_json(), out);
    if (!rep.valid) exit_code = 1;
  });

  // csp
  auto* csp = app.add_subcommand("csp", "CSP tools");
  csp->require_subcommand(1);
  std::string csp_path, which = "symmetric", eta_path, method = "mt", weights_path, trace_path;
  std::size_t mt_cap = 100000, max_iters = 64;
  auto* chk = csp->add_subcommand("check", "evaluate an LLL condition");
  chk->add_option("--csp", csp_path)->required();
  chk->add_option("--which", which, "symmetric|general|measurable|neighborhood-growth")->capture_default_str();
  chk->add_option("--eta", eta_path, "JSON list of eta values, one per constraint");
  chk->add_option("--graph", graph_path, "graph for the neighborhood-growth condition");
  chk->callback([&] {
    auto c = Csp::from_json(read_json(csp_path), cap_bits);
    std::optional<std::vector<Rational>> eta;
    if (!eta_path.empty()) {
      eta.emplace();
      for (const auto& e : read_json(eta_path)) {
        Rational q(e.is_string() ? e.get<std::string>() : std::to_string(e.get<std::int64_t>()));
        q.canonicalize();
        eta->push_back(q);
      }
    }
    std::optional<StructuredGraph> g;
    if (!graph_path.empty()) g = StructuredGraph::from_json(read_json(graph_path));
    auto v = lll_check(c, which, eta, g ? &*g : nullptr);
    emit(v.to_json(), out);
    if (!v.holds) exit_code = 1;
  });

  auto* sol = csp->add_subcommand("solve", "solve a CSP");
  sol->add_option("--csp", csp_path)->required();
  sol->add_option("--method", method, "mt|weighted|exhaustive")->capture_default_str();
  sol->add_option("--weights", weights_path, "weights for the weighted solver (default uniform)");
  sol->add_option("--trace", trace_path, "write the step records and partial-solution traces here");
  sol->add_option("--cap", mt_cap, "resample budget for mt")->capture_default_str();
  sol->add_option("--max-iters", max_iters)->capture_default_str();
  sol->callback([&] {
    auto c = Csp::from_json(read_json(csp_path), cap_bits);
    json rep = {{"method", method}};
    std::optional<Assignment> a;
    if (method == "mt") {
      auto r = moser_tardos_solve(c, derive_seed(seed, "moser_tardos"), mt_cap);
      rep["resamples"] = r.resamples;
      rep["capped"] = r.capped;
      a = r.solution;
    } else if (method == "weighted") {
      auto w = weights_path.empty() ? WeightedGroundSet::uniform(c.ground) : WeightedGroundSet::from_json(read_json(weights_path));
      StepOptions opt;
      opt.boot.cap_bits = cap_bits;
      opt.partial.seed = seed;
      auto r = solve_weighted(c, w, max_iters, opt);
      rep["iterations"] = r.iterations;
      rep["iteration_bound"] = r.iteration_bound;
      rep["finished_by_extension"] = r.finished_by_extension;
      rep["failure"] = r.failure;
      if (!trace_path.empty()) {
        auto tj = r.to_json();
        auto traces = json::array();
        for (const auto& t : r.traces) traces.push_back(t.to_json());
        tj["traces"] = traces;
        emit(tj, trace_path);
      }
      a = r.solution;
    } else if (method == "exhaustive") {
      a = solve_exhaustive(c, cap_bits);
    } else {
      throw Error("unknown method: " + method);
    }
    bool ok = a && is_solution(c, *a).ok;
    rep["solution"] = a ? assignment_json(*a) : json(nullptr);
    rep["valid"] = ok;
    emit(rep, out);
    if (!ok) exit_code = 1;
  });

  auto* cov = csp->add_subcommand("cover", "build a covering family of partial solutions");
  cov->add_option("--csp", csp_path)->required();
  cov->callback([&] {
    auto c = Csp::from_json(read_json(csp_path), cap_bits);
    StepOptions opt;
    opt.boot.cap_bits = cap_bits;
    auto fam = cover_family(c, opt, cap_bits);
    emit(fam.to_json(), out);
    if (!(fam.covers && fam.counts_ok && fam.residuals_ok)) exit_code = 1;
  });

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "run an experiment config");
  pipe->require_subcommand(1);
  std::string config_path;
  auto run_pipeline = [&](const std::string& name) {
    auto raw = read_json(config_path);
    if (!raw.is_object()) throw Error("config must be a JSON object");
    if (!raw.contains("pipeline")) raw["pipeline"] = name;
    if (raw.at("pipeline") != name) throw Error("config pipeline " + raw.at("pipeline").dump() + " does not match " + name);
    if (!raw.contains("seed")) raw["seed"] = seed;
    if (!raw.contains("cap_enum_bits")) raw["cap_enum_bits"] = cap_bits;
    auto base = std::filesystem::path(config_path).parent_path().string();
    auto cfg = ExperimentConfig::from_json(raw, base.empty() ? "." : base);
    auto rep = run_experiment(cfg);
    emit(rep.body, out);
    if (!rep.ok) exit_code = 1;
  };
  for (const char* name : {"det", "rand", "lll-suite", "gadget"}) {
    auto* sub = pipe->add_subcommand(name, std::string("run the ") + name + " pipeline");
    sub->add_option("--config", config_path)->required();
    std::string n = name;
    sub->callback([&, n] { run_pipeline(n); });
  }

  // gadget
  auto* gad = app.add_subcommand("gadget", "build the degree-reduction gadget graph");
  int k = 0;
  gad->add_option("--graph", graph_path)->required();
  gad->add_option("--k", k)->required();
  gad->callback([&] {
    auto g = StructuredGraph::from_json(read_json(graph_path));
    auto gd = gadget_build(g, k);
    emit({{"k", gd.k}, {"c", gd.c}, {"slots", gd.slots}, {"graph", gd.graph.to_json()},
          {"max_degree", gd.graph.max_degree()}, {"source_max_degree", g.max_degree()}},
         out);
  });

  // report
  auto* rpt = app.add_subcommand("report", "aggregate experiment reports");
  std::vector<std::string> paths;
  bool text = false;
  rpt->add_option("paths", paths, "report files");
  rpt->add_flag("--text", text, "plain-text table instead of JSON");
  rpt->callback([&] {
    auto s = emit_summary(paths);
    if (text) {
      if (out.empty() || out == "-") std::cout << s.text;
      else std::ofstream(out) << s.text;
    } else {
      emit(s.table, out);
    }
    if (!s.table["errors"].empty()) exit_code = 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return exit_code;
}
