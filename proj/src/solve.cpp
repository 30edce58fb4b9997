#include <algorithm>
#include <set>

#include "loclll/lll.hpp"

namespace loclll {

namespace {

const Rational kMeasEps = frac(1, 32768);

Rational two_pow_neg(unsigned k) {
  Rational q = 1;
  for (unsigned i = 0; i < k; ++i) q /= 2;
  return q;
}

struct Prepared {
  std::string route;
  Reduction sigma;  // B <- binary target
  nlohmann::json bootstrap;
  nlohmann::json checks = nlohmann::json::object();
};

nlohmann::json ineq(const Rational& lhs, const Rational& rhs) {
  return {{"lhs", lhs.get_str()}, {"rhs", rhs.get_str()}, {"holds", lhs <= rhs}};
}

Prepared prepare(const Csp& b, const Reduction& rho_in, const StepOptions& opt) {
  Prepared pr;
  auto meas = power_check(rho_in.target, 8, kMeasEps, "measurable");
  pr.checks["precondition"] = meas.to_json();
  if (!meas.holds) throw Error("step precondition p(d+1)^8 <= 2^-15 fails on the reduction target: " + meas.inputs.dump());

  Rational eps_boot = two_pow_neg(32) / (1 + opt.binary_eps);
  auto boot = bootstrap(b, rho_in, 16, eps_boot, opt.boot);
  pr.bootstrap = boot.to_json();
  if (boot.reduction) {
    auto bin = binary_reduce(boot.reduction->target, opt.binary_eps);
    Reduction sigma{compose(boot.reduction->conn, bin.decode), bin.target};
    auto target = power_check(bin.target, 16, two_pow_neg(32), "(16,2^-32)");
    auto s = stats(bin.target);
    Rational dr = static_cast<long>(sigma.degree());
    pr.checks["bootstrap_target"] = target.to_json();
    pr.checks["p d(rho)^2 <= 1/4"] = ineq(s.p * dr * dr, frac(1, 4));
    if (target.holds && s.p * dr * dr <= frac(1, 4)) {
      pr.route = "bootstrap";
      pr.sigma = std::move(sigma);
      return pr;
    }
  }
  auto bin = binary_reduce(rho_in.target, opt.binary_eps);
  Reduction sigma{compose(rho_in.conn, bin.decode), bin.target};
  auto pre = partial_precondition(bin.target);
  auto s = stats(bin.target);
  Rational dr = static_cast<long>(sigma.degree());
  pr.checks["partial_precondition"] = pre.to_json();
  pr.checks["p d(rho)^2 <= 1/4"] = ineq(s.p * dr * dr, frac(1, 4));
  if (!pre.holds || s.p * dr * dr > frac(1, 4))
    throw Error("step infeasible: bootstrap route " + boot.route + " and the binary target fails " +
                (pre.holds ? std::string("p d(rho)^2 <= 1/4") : std::string("p(d+1)^2 <= 0.1353/4")));
  pr.route = "a_posteriori";
  pr.sigma = std::move(sigma);
  return pr;
}

struct Certificate {
  std::string kind;  // pulled | identity | none
  nlohmann::json values = nlohmann::json::object();
};

// (a) the pulled residual target is (8, 2^-15); otherwise (b) the residual source itself is.
Certificate certify(const Csp& pulled_target, const Csp& residual_source) {
  Certificate c;
  auto a = power_check(pulled_target, 8, kMeasEps, "pulled");
  c.values["pulled"] = a.to_json();
  if (a.holds) {
    c.kind = "pulled";
    return c;
  }
  auto b = power_check(residual_source, 8, kMeasEps, "identity");
  c.values["identity"] = b.to_json();
  c.kind = b.holds ? "identity" : "none";
  return c;
}

std::vector<Elem> keys(const Assignment& a) {
  std::vector<Elem> out;
  for (const auto& [k, v] : a) out.push_back(k);
  return out;
}

}  // namespace

nlohmann::json StepRecord::to_json() const {
  return {{"route", route},
          {"remaining_before", remaining_before.get_str()},
          {"covered", covered.get_str()},
          {"covered_fraction", covered_fraction.get_str()},
          {"residual_certificate", residual_certificate},
          {"bootstrap", bootstrap},
          {"checks", checks}};
}

StepResult step(const Csp& b, const Reduction& rho_in, const WeightedGroundSet& wts, const StepOptions& opt) {
  auto pr = prepare(b, rho_in, opt);
  StepResult out;
  out.record.route = pr.route;
  out.record.bootstrap = pr.bootstrap;
  out.record.checks = pr.checks;
  out.record.remaining_before = 1;

  const Csp& c = pr.sigma.target;
  if (pr.route == "bootstrap") {
    // the computation p(C/h)(d+1)^8 <= 2 sqrt(p(C)) (d(C)+1)^8 <= 2^-15, squared
    auto s = stats(c);
    Rational lhs = 4 * s.p * rpow(Rational(static_cast<long>(s.d + 1)), 16);
    out.record.checks["4 p (d+1)^16 <= 2^-30"] = ineq(lhs, two_pow_neg(30));
  }
  auto part = construct_partial(c, pr.sigma, wts, opt.partial);
  out.record.checks["partial"] = part.guarantees.to_json();
  if (!part.guarantees.all()) throw Error("construct_partial guarantees failed: " + part.guarantees.to_json().dump());
  out.trace = part.trace;

  auto pulled = pull_partial(pr.sigma, part.h);
  out.g = pulled.g;
  out.residual_source = restrict_csp(b, out.g);
  auto cert = certify(pulled.residual.target, out.residual_source);
  out.record.checks["residual"] = cert.values;
  out.record.residual_certificate = cert.kind;
  if (cert.kind == "none") throw Error("residual certification failed: " + cert.values.dump());
  out.residual = cert.kind == "pulled" ? pulled.residual : identity_reduction(out.residual_source);

  out.record.covered = wts.of(keys(out.g));
  out.record.covered_fraction = out.record.covered;
  out.record.checks["covered >= 1/2"] = {{"covered", out.record.covered.get_str()}, {"holds", out.record.covered >= frac(1, 2)}};
  if (out.record.covered < frac(1, 2)) throw Error("step covered weight " + out.record.covered.get_str() + " < 1/2");
  return out;
}

nlohmann::json SolveResult::to_json() const {
  auto st = nlohmann::json::array();
  for (const auto& s : steps) st.push_back(s.to_json());
  nlohmann::json sol = nullptr;
  if (solution) {
    sol = nlohmann::json::object();
    for (const auto& [x, v] : *solution) sol[std::to_string(x)] = v;
  }
  return {{"solution", sol},
          {"iterations", iterations},
          {"iteration_bound", iteration_bound},
          {"finished_by_extension", finished_by_extension},
          {"failure", failure},
          {"steps", st}};
}

SolveResult solve_weighted(const Csp& b, const WeightedGroundSet& wts, std::size_t max_iters, const StepOptions& opt) {
  b.validate();
  SolveResult res;
  if (b.ground.empty()) {
    res.solution = Assignment{};
    return res;
  }
  wts.validate();
  res.iteration_bound = iteration_bound(wts.min_positive());
  Csp current = b;
  Reduction rho = identity_reduction(b);
  Assignment total;
  while (true) {
    Rational remaining = wts.of(current.ground);
    if (remaining == 0) break;
    if (res.iterations >= max_iters) {
      res.failure = "iteration budget exceeded after " + std::to_string(res.iterations) + " steps";
      return res;
    }
    auto cw = *wts.conditioned(current.ground);
    StepResult st;
    try {
      st = step(current, rho, cw, opt);
    } catch (const Error& e) {
      res.failure = e.what();
      return res;
    }
    st.record.remaining_before = remaining;
    res.steps.push_back(st.record);
    res.traces.push_back(st.trace);
    ++res.iterations;
    for (const auto& [x, v] : st.g) total[x] = v;
    current = std::move(st.residual_source);
    rho = std::move(st.residual);
  }
  if (!current.ground.empty()) {
    res.finished_by_extension = true;
    std::optional<Assignment> ext;
    try {
      ext = solve_exhaustive(current);
    } catch (const CapExceeded&) {
      ext = moser_tardos_solve(current, derive_seed(opt.partial.seed, "extension"), 1000 * (current.constraints.size() + 1)).solution;
    }
    if (!ext) {
      res.failure = "no extension of the partial solution was found";
      return res;
    }
    for (const auto& [x, v] : *ext) total[x] = v;
  }
  auto chk = is_solution(b, total);
  if (!chk.ok) {
    res.failure = "assembled assignment violates " + std::to_string(chk.violated.size()) + " constraints";
    return res;
  }
  res.solution = std::move(total);
  return res;
}

nlohmann::json CoverFamily::to_json() const {
  nlohmann::json cov = nlohmann::json::object();
  for (const auto& [x, k] : coverage) cov[std::to_string(x)] = k;
  nlohmann::json out = {{"bits", bits},         {"size", members.size()},        {"coverage", cov},
                        {"covers", covers},     {"counts_ok", counts_ok},        {"residuals_ok", residuals_ok},
                        {"route", route},       {"bootstrap_routes", bootstrap_routes}};
  if (members.size() <= 1024) {
    auto arr = nlohmann::json::array();
    for (const auto& g : members) {
      nlohmann::json m = nlohmann::json::object();
      for (const auto& [x, v] : g) m[std::to_string(x)] = v;
      arr.push_back(m);
    }
    out["members"] = arr;
  }
  return out;
}

CoverFamily cover_family(const Csp& b, const StepOptions& opt, int budget_bits) {
  b.validate();
  CoverFamily fam;
  auto pr = prepare(b, identity_reduction(b), opt);
  fam.route = pr.route;
  fam.bootstrap_routes = pr.route == "bootstrap";
  const Csp& c = pr.sigma.target;
  auto classes = discrete_partition(c);
  fam.bits = classes.size();
  if (static_cast<int>(fam.bits) > budget_bits)
    throw CapExceeded("cover_family enumerates 2^N words with N=" + std::to_string(fam.bits), static_cast<double>(fam.bits), budget_bits);
  Rational p = stats(c).p;
  for (Elem x : b.ground) fam.coverage[x] = 0;
  fam.residuals_ok = true;
  for_each_word(c, classes, p, [&](const std::vector<Value>&, const Assignment& h, const std::vector<Constraint>& cons) {
    auto g = loclll::apply(pr.sigma.conn, h);
    for (const auto& [x, v] : g) ++fam.coverage[x];
    Csp ch;
    ch.m = c.m;
    for (Elem y : c.ground)
      if (!h.count(y)) ch.ground.push_back(y);
    ch.constraints = cons;
    if (certify(ch, restrict_csp(b, g)).kind == "none") fam.residuals_ok = false;
    fam.members.push_back(std::move(g));
  });
  const std::uint64_t total = std::uint64_t{1} << fam.bits;
  fam.covers = std::all_of(fam.coverage.begin(), fam.coverage.end(), [](const auto& kv) { return kv.second > 0; });
  const std::uint64_t half = total / 2;
  fam.counts_ok = std::all_of(fam.coverage.begin(), fam.coverage.end(), [&](const auto& kv) { return kv.second >= half; });
  return fam;
}

}  // namespace loclll
