#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "loclll/experiment.hpp"

namespace loclll {

RandomCspParams random_csp_params(const nlohmann::json& j) {
  RandomCspParams p;
  p.ground = j.value("ground", p.ground);
  p.m = j.value("m", p.m);
  p.arity = j.value("arity", j.value("b", p.arity));
  p.constraints = j.value("constraints", p.constraints);
  p.forbidden = j.value("forbidden", p.forbidden);
  p.max_degree = j.value("max_degree", p.max_degree);
  return p;
}

Csp random_csp(const RandomCspParams& params, std::uint64_t seed, int cap_bits) {
  if (params.m < 1) throw Error("random_csp: m must be positive");
  if (params.arity < 1 || params.arity > params.ground) throw Error("random_csp: arity must lie in [1, ground]");
  auto rng = make_rng(seed, "random_csp");
  Csp c;
  c.m = params.m;
  c.ground.resize(params.ground);
  std::iota(c.ground.begin(), c.ground.end(), Elem{0});
  std::vector<std::vector<Elem>> doms;
  std::size_t attempts = 0;
  while (doms.size() < params.constraints && attempts < 100 * (params.constraints + 1)) {
    ++attempts;
    std::vector<Elem> pool = c.ground;
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<Elem> dom(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(params.arity));
    std::sort(dom.begin(), dom.end());
    if (params.max_degree) {
      std::set<std::size_t> nb;
      for (std::size_t i = 0; i < doms.size(); ++i)
        for (Elem e : dom)
          if (std::binary_search(doms[i].begin(), doms[i].end(), e)) nb.insert(i);
      if (nb.size() > params.max_degree) continue;
      bool ok = true;
      for (auto i : nb) {
        std::size_t deg = 0;
        for (std::size_t j = 0; j < doms.size(); ++j) {
          if (j == i) continue;
          bool meet = std::any_of(doms[i].begin(), doms[i].end(),
                                  [&](Elem e) { return std::binary_search(doms[j].begin(), doms[j].end(), e); });
          deg += meet;
        }
        if (deg + 1 > params.max_degree) ok = false;
      }
      if (!ok) continue;
    }
    doms.push_back(dom);
  }
  double space = std::pow(static_cast<double>(params.m), static_cast<double>(params.arity));
  std::size_t k = static_cast<std::size_t>(std::min<double>(static_cast<double>(params.forbidden), space));
  for (const auto& dom : doms) {
    std::set<std::vector<Value>> tuples;
    while (tuples.size() < k) {
      std::vector<Value> t;
      for (std::size_t j = 0; j < dom.size(); ++j) t.push_back(uniform_int(rng, 1, params.m));
      tuples.insert(t);
    }
    auto con = Constraint::forbidden(dom, params.m, {tuples.begin(), tuples.end()});
    if (con.cap_bits() != cap_bits) con = Constraint(dom, params.m, con.body(), cap_bits);
    c.constraints.push_back(std::move(con));
  }
  return c;
}

namespace {

bool color_rec(const StructuredGraph& g, std::vector<int>& col, std::size_t i, int k) {
  if (i == g.size()) return true;
  for (int c = 0; c < k; ++c) {
    bool ok = true;
    for (auto j : g.adj(i))
      if (j < i && col[j] == c) ok = false;
    if (!ok) continue;
    col[i] = c;
    if (color_rec(g, col, i + 1, k)) return true;
  }
  return false;
}

}  // namespace

std::optional<int> chromatic_number(const StructuredGraph& g, int kmax) {
  if (g.size() == 0) return 0;
  for (int k = 1; k <= kmax; ++k) {
    std::vector<int> col(g.size(), -1);
    if (color_rec(g, col, 0, k)) return k;
  }
  return std::nullopt;
}

namespace {

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("cannot parse " + path + ": " + e.what());
  }
}

std::string resolve(const std::string& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_absolute()) return p;
  return (std::filesystem::path(base) / path).string();
}

StructuredGraph load_graph(const nlohmann::json& spec, std::uint64_t seed) {
  if (spec.contains("path")) return StructuredGraph::from_json(read_json_file(spec.at("path").get<std::string>()));
  if (spec.contains("generate")) {
    const auto& gj = spec.at("generate");
    return generate(gj.at("kind").get<std::string>(), gj.value("params", nlohmann::json::object()),
                    derive_seed(seed, "graph"));
  }
  if (spec.contains("vertices")) return StructuredGraph::from_json(spec);
  throw Error("graph source needs path, generate, or an inline graph");
}

Csp load_csp(const nlohmann::json& spec, int cap_bits, std::uint64_t seed, std::uint64_t index) {
  if (spec.contains("path")) return Csp::from_json(read_json_file(spec.at("path").get<std::string>()), cap_bits);
  if (spec.contains("random")) return random_csp(random_csp_params(spec.at("random")), derive_seed(seed, "csp", index), cap_bits);
  if (spec.contains("ground")) return Csp::from_json(spec, cap_bits);
  throw Error("csp source needs path, random, or an inline csp");
}

nlohmann::json check(const std::string& name, bool holds, nlohmann::json values = nlohmann::json::object()) {
  return {{"name", name}, {"holds", holds}, {"values", std::move(values)}};
}

nlohmann::json labeling_json(const VertexLabeling& f) {
  nlohmann::json out = nlohmann::json::object();
  for (auto [v, c] : f) out[std::to_string(v)] = c;
  return out;
}

nlohmann::json assignment_json(const Assignment& f) {
  nlohmann::json out = nlohmann::json::object();
  for (auto [x, v] : f) out[std::to_string(x)] = v;
  return out;
}

Builtin load_builtin(const nlohmann::json& raw) {
  const auto& aj = raw.at("algorithm");
  auto bi = builtin_algorithm(aj.at("name").get<std::string>(), aj.value("params", nlohmann::json::object()));
  if (raw.contains("problem")) {
    const auto& pj = raw.at("problem");
    bi.problem = make_problem(pj.at("name").get<std::string>(), pj.value("params", nlohmann::json::object()));
  }
  if (raw.contains("rounds")) bi.rounds = raw.at("rounds").get<int>();
  return bi;
}

void run_det(const ExperimentConfig& cfg, nlohmann::json& body, nlohmann::json& checks) {
  const auto& raw = cfg.raw;
  auto g = load_graph(raw.at("graph"), cfg.seed);
  auto bi = load_builtin(raw);
  auto n = raw.value("n", static_cast<std::int64_t>(g.size()));
  auto orders = raw.value("orders", std::size_t{1});
  auto runs = nlohmann::json::array();
  for (std::size_t k = 0; k < orders; ++k) {
    auto order = g.vertices();
    if (k > 0) {
      auto rng = make_rng(cfg.seed, "greedy_order", k);
      std::shuffle(order.begin(), order.end(), rng);
    }
    auto rep = det_pipeline(bi.alg, bi.problem, g, n, bi.rounds, order);
    auto j = rep.to_json();
    j["order_index"] = k;
    runs.push_back(j);
    checks.push_back(check("verify_lcl order " + std::to_string(k), rep.run.valid,
                           {{"violating", rep.run.violating_vertices.size()}}));
    checks.push_back(check("ids_used <= n order " + std::to_string(k), rep.ids_used <= n,
                           {{"ids_used", rep.ids_used}, {"n", n}}));
  }
  body["graph"] = {{"vertices", g.size()}, {"edges", g.edges().size()}, {"max_degree", g.max_degree()}};
  body["algorithm"] = {{"name", bi.alg.name}, {"params", bi.alg.params}, {"rounds", bi.rounds}};
  body["problem"] = {{"name", bi.problem.name}, {"params", bi.problem.params}, {"t", bi.problem.t}};
  body["runs"] = runs;
}

void run_rand(const ExperimentConfig& cfg, nlohmann::json& body, nlohmann::json& checks) {
  const auto& raw = cfg.raw;
  auto g = load_graph(raw.at("graph"), cfg.seed);
  auto bi = load_builtin(raw);
  Value m = raw.value("m", Value{2});
  auto rc = rand_to_csp(bi.alg, bi.problem, g, m, bi.rounds, cfg.cap_bits);
  auto st = stats(rc.csp);
  body["csp"] = {{"ground", rc.csp.ground.size()}, {"constraints", rc.csp.constraints.size()}, {"m", m},
                 {"p", st.p.get_str()}, {"d", st.d}, {"b", st.b}, {"radius", rc.radius}, {"max_ball_2R", rc.max_ball_2R}};
  checks.push_back(check("d(C) + 1 <= max|ball(x,2R)|", st.d + 1 <= rc.max_ball_2R,
                         {{"d", st.d}, {"max_ball_2R", rc.max_ball_2R}}));
  auto verdicts = nlohmann::json::object();
  for (const char* which : {"symmetric", "measurable"}) verdicts[which] = lll_check(rc.csp, which).to_json();
  body["lll"] = verdicts;

  std::string method = raw.value("method", std::string("auto"));
  std::optional<Assignment> sol;
  std::string used;
  nlohmann::json solver = nlohmann::json::object();
  if ((method == "auto" && verdicts["measurable"]["holds"].get<bool>()) || method == "weighted") {
    auto res = solve_weighted(rc.csp, WeightedGroundSet::uniform(rc.csp.ground), raw.value("max_iters", std::size_t{64}));
    solver = res.to_json();
    solver.erase("solution");
    sol = res.solution;
    used = "weighted";
  }
  if (!sol && (method == "auto" || method == "mt")) {
    auto res = moser_tardos_solve(rc.csp, derive_seed(cfg.seed, "moser_tardos"), raw.value("mt_cap", std::size_t{100000}));
    solver["mt"] = {{"resamples", res.resamples}, {"capped", res.capped}};
    sol = res.solution;
    used = "mt";
  }
  if (!sol && (method == "auto" || method == "exhaustive")) {
    sol = solve_exhaustive(rc.csp, cfg.cap_bits);
    used = "exhaustive";
  }
  body["solver"] = solver;
  body["method"] = used;
  checks.push_back(check("solution found", sol.has_value()));
  if (!sol) return;
  checks.push_back(check("is_solution", is_solution(rc.csp, *sol).ok));
  auto decoded = loclll::apply(rc.decode, *sol);
  VertexLabeling f(decoded.begin(), decoded.end());
  auto rep = verify_lcl(bi.problem, g, f);
  body["seeds"] = assignment_json(*sol);
  body["outputs"] = labeling_json(f);
  checks.push_back(check("decoded labeling passes verify_lcl", rep.valid, {{"violating", rep.violating_vertices}}));
}

void run_gadget(const ExperimentConfig& cfg, nlohmann::json& body, nlohmann::json& checks) {
  const auto& raw = cfg.raw;
  auto g = load_graph(raw.at("graph"), cfg.seed);
  int k = raw.at("k").get<int>();
  auto gad = gadget_build(g, k);
  const auto& h = gad.graph;
  auto delta = static_cast<std::int64_t>(g.max_degree());
  auto delta_h = static_cast<std::int64_t>(h.max_degree());
  body["gadget"] = {{"k", k}, {"c", gad.c}, {"vertices", h.size()}, {"edges", h.edges().size()}, {"max_degree", delta_h}};
  checks.push_back(check("max_degree(H) <= max_degree(G) - 1", delta_h <= delta - 1, {{"G", delta}, {"H", delta_h}}));
  bool exact = true;
  for (std::size_t x = 0; x < gad.source_order.size(); ++x)
    for (int i = 1; i <= k - 1; ++i)
      if (static_cast<std::int64_t>(h.adj(h.index_of(gad.v(x, i))).size()) != delta - 1) exact = false;
  checks.push_back(check("deg v_i(x) = max_degree(G) - 1", exact));
  if (g.size() <= static_cast<std::size_t>(raw.value("brute_force_limit", 8))) {
    auto chi_g = chromatic_number(g, k);
    body["chi_G_at_most_k"] = chi_g.has_value();
    if (chi_g) {
      auto chi_h = chromatic_number(h, k);
      checks.push_back(check("chi(H) <= k", chi_h.has_value(), {{"chi_G", *chi_g}}));
    }
  }
}

void run_suite(const ExperimentConfig& cfg, nlohmann::json& body, nlohmann::json& checks) {
  const auto& raw = cfg.raw;
  const auto& sj = raw.at("suite");
  auto count = sj.value("count", std::size_t{10});
  auto solver = sj.value("solver", std::string("mt"));
  auto rows = nlohmann::json::array();
  std::size_t passed = 0;
  for (std::size_t i = 0; i < count; ++i) {
    auto c = load_csp(sj.at("csp"), cfg.cap_bits, cfg.seed, i);
    nlohmann::json row = {{"index", i}, {"constraints", c.constraints.size()}};
    auto st = stats(c);
    row["p"] = st.p.get_str();
    row["d"] = st.d;
    bool ok = false;
    if (solver == "mt") {
      auto sym = lll_check(c, "symmetric");
      row["symmetric"] = sym.holds;
      auto res = moser_tardos_solve(c, derive_seed(cfg.seed, "moser_tardos", i), sj.value("cap_per_constraint", std::size_t{50}) * std::max<std::size_t>(c.constraints.size(), 1));
      row["resamples"] = res.resamples;
      row["capped"] = res.capped;
      ok = res.solution && is_solution(c, *res.solution).ok;
    } else if (solver == "weighted") {
      auto meas = lll_check(c, "measurable");
      row["measurable"] = meas.holds;
      auto res = solve_weighted(c, WeightedGroundSet::uniform(c.ground), sj.value("max_iters", std::size_t{64}));
      row["iterations"] = res.iterations;
      row["iteration_bound"] = res.iteration_bound;
      row["failure"] = res.failure;
      auto routes = nlohmann::json::array();
      for (const auto& s : res.steps) routes.push_back(s.route);
      row["routes"] = routes;
      ok = res.solution && is_solution(c, *res.solution).ok && res.iterations <= res.iteration_bound;
    } else {
      throw Error("unknown suite solver: " + solver);
    }
    row["ok"] = ok;
    passed += ok;
    rows.push_back(row);
    checks.push_back(check("instance " + std::to_string(i), ok));
  }
  body["instances"] = rows;
  body["passed"] = passed;
  body["count"] = count;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, const std::string& base_dir) {
  if (!j.is_object()) throw Error("config must be a JSON object");
  ExperimentConfig cfg;
  cfg.pipeline = j.at("pipeline").get<std::string>();
  static const std::set<std::string> known{"det", "rand", "lll-suite", "gadget"};
  if (!known.count(cfg.pipeline)) throw Error("unknown pipeline: " + cfg.pipeline);
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.cap_bits = j.value("cap_enum_bits", kDefaultCapBits);
  if (cfg.cap_bits <= 0) throw Error("cap_enum_bits must be positive");
  cfg.raw = j;
  // make file references relative to the config and check that they exist
  std::function<void(nlohmann::json&)> fix = [&](nlohmann::json& node) {
    if (node.is_object()) {
      for (auto& [k, v] : node.items()) {
        if (k == "path" && v.is_string()) {
          v = resolve(base_dir, v.get<std::string>());
          if (!std::filesystem::exists(v.get<std::string>())) throw Error("referenced file does not exist: " + v.get<std::string>());
        } else {
          fix(v);
        }
      }
    } else if (node.is_array()) {
      for (auto& v : node) fix(v);
    }
  };
  fix(cfg.raw);
  return cfg;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  nlohmann::json body = nlohmann::json::object();
  auto checks = nlohmann::json::array();
  if (cfg.pipeline == "det") run_det(cfg, body, checks);
  else if (cfg.pipeline == "rand") run_rand(cfg, body, checks);
  else if (cfg.pipeline == "gadget") run_gadget(cfg, body, checks);
  else run_suite(cfg, body, checks);
  rep.ok = std::all_of(checks.begin(), checks.end(), [](const nlohmann::json& c) { return c.at("holds").get<bool>(); });
  rep.body = {{"pipeline", cfg.pipeline},
              {"config", cfg.raw},
              {"seed", cfg.seed},
              {"cap_enum_bits", cfg.cap_bits},
              {"results", body},
              {"checks", checks},
              {"ok", rep.ok}};
  return rep;
}

Summary emit_summary(const std::vector<std::string>& paths) {
  Summary s;
  nlohmann::json pipelines = nlohmann::json::object();
  nlohmann::json check_counts = nlohmann::json::object();
  auto errors = nlohmann::json::array();
  std::size_t reports = 0, passed = 0, iterations = 0;
  for (const auto& p : paths) {
    nlohmann::json r;
    try {
      r = read_json_file(p);
      if (!r.is_object() || !r.contains("ok") || !r.contains("pipeline")) throw Error("not a report: " + p);
    } catch (const Error& e) {
      errors.push_back({{"path", p}, {"error", e.what()}});
      continue;
    }
    ++reports;
    bool ok = r.at("ok").get<bool>();
    passed += ok;
    auto name = r.at("pipeline").get<std::string>();
    auto& pl = pipelines[name];
    if (pl.is_null()) pl = {{"reports", 0}, {"passed", 0}};
    pl["reports"] = pl.value("reports", 0) + 1;
    pl["passed"] = pl.value("passed", 0) + (ok ? 1 : 0);
    for (const auto& c : r.value("checks", nlohmann::json::array())) {
      auto& cc = check_counts[c.at("name").get<std::string>()];
      if (cc.is_null()) cc = {{"count", 0}, {"passed", 0}};
      cc["count"] = cc.value("count", 0) + 1;
      cc["passed"] = cc.value("passed", 0) + (c.at("holds").get<bool>() ? 1 : 0);
    }
    const auto& res = r.value("results", nlohmann::json::object());
    if (res.contains("solver") && res["solver"].contains("iterations")) iterations += res["solver"]["iterations"].get<std::size_t>();
    for (const auto& inst : res.value("instances", nlohmann::json::array()))
      iterations += inst.value("iterations", std::size_t{0});
  }
  s.table = {{"reports", reports}, {"passed", passed},   {"iterations", iterations},
             {"pipelines", pipelines}, {"checks", check_counts}, {"errors", errors}};
  std::ostringstream out;
  out << "reports " << reports << " passed " << passed << " iterations " << iterations << "\n";
  for (const auto& [name, pl] : pipelines.items())
    out << "pipeline " << name << " " << pl["passed"].get<int>() << "/" << pl["reports"].get<int>() << "\n";
  for (const auto& [name, cc] : check_counts.items())
    out << "check " << name << " " << cc["passed"].get<int>() << "/" << cc["count"].get<int>() << "\n";
  for (const auto& e : errors) out << "error " << e["path"].get<std::string>() << ": " << e["error"].get<std::string>() << "\n";
  s.text = out.str();
  return s;
}

}  // namespace loclll
