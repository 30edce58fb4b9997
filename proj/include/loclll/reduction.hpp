#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "loclll/csp.hpp"
#include "loclll/local.hpp"

namespace loclll {

using View = std::vector<std::optional<Value>>;
// Local rule: evaluated on the values of S(x), in the order of S(x).
using ConnectionRule = std::function<std::optional<Value>(Elem x, const View& view)>;

struct Connection {
  std::vector<Elem> source;                  // X
  std::vector<Elem> target;                  // Y
  std::map<Elem, std::vector<Elem>> det;     // S(x), sorted
  ConnectionRule rule;
  nlohmann::json descriptor = nlohmann::json::object();

  const std::vector<Elem>& S(Elem x) const;
  std::size_t width() const;
  std::optional<Value> eval(Elem x, const Assignment& f) const;
};

struct Reduction {
  Connection conn;
  Csp target;
  // d(rho): max number of target constraints whose domain meets S(x)
  std::size_t degree() const;
};

Assignment apply(const Connection& rho, const Assignment& f);
Connection identity_connection(const std::vector<Elem>& ground);
Reduction identity_reduction(const Csp& c);
// rho: X <- Y, sigma: Y <- Z  gives  X <- Z.
Connection compose(const Connection& rho, const Connection& sigma);
std::size_t connection_degree(const Connection& rho, const Csp& target);

struct BinaryReduction {
  Csp target;          // binary CSP on Y x [N]
  Connection decode;   // tau: Y <- Y x [N]
  int bits = 0;        // N
  Rational delta;
  std::vector<Integer> block_sizes;  // s_1..s_n, larger blocks first
  Elem encode_id(std::size_t y_index, int bit) const;  // bit in [N]
  std::vector<Elem> source_ground;
};

BinaryReduction binary_reduce(const Csp& c, const Rational& eps);
// The value xi(code) for an N-bit code with entries in {1, 2}.
Value binary_decode_value(const std::vector<Integer>& block_sizes, const std::vector<Value>& code);

struct RandCsp {
  Csp csp;
  Connection decode;  // seeds on V(G) -> outputs on V(G)
  int radius = 0;     // R = T + t
  std::size_t max_ball_2R = 0;
};

RandCsp rand_to_csp(const LocalAlgorithm& alg, const LclProblem& problem, const StructuredGraph& g, Value m, int rounds,
                    int cap_bits = kDefaultCapBits, std::size_t canonical_cap = 64);

struct BootstrapAttempt {
  std::string candidate;  // "identity" or "n=<n>"
  bool feasible = false;
  std::string failing;    // first failing inequality or cap message
  nlohmann::json values = nlohmann::json::object();
};

struct BootstrapResult {
  std::optional<Reduction> reduction;  // B <- C
  std::string route;
  std::vector<BootstrapAttempt> attempts;
  nlohmann::json to_json() const;
};

struct BootstrapOptions {
  std::vector<std::int64_t> n_grid{16, 64, 256, 1024};
  double c = 8.0;
  int cap_bits = kDefaultCapBits;
  int seed_budget_bits = 12;  // per-constraint enumeration budget for exact p(C)
  bool try_identity = true;
};

// rho: B <- B0; looks for C, rho' with p(C)(d(C)+1)^N <= eps and p(C) d(rho')^N <= eps.
BootstrapResult bootstrap(const Csp& b, const Reduction& rho, unsigned N, const Rational& eps,
                          const BootstrapOptions& opt = {});

struct PulledPartial {
  Assignment g;         // rho(h) on X
  Reduction residual;   // (B / rho(h)) <- (C / h)
  std::vector<Elem> residual_source;
};

PulledPartial pull_partial(const Reduction& rho, const Assignment& h);

}  // namespace loclll
