#include <algorithm>

#include "loclll/reduction.hpp"

namespace loclll {

namespace {

struct Blocks {
  int bits = 0;
  std::uint64_t n = 0;
  std::uint64_t q = 0;  // small block size
  std::uint64_t r = 0;  // number of blocks of size q + 1

  std::uint64_t start(Value v) const {
    auto i = static_cast<std::uint64_t>(v - 1);
    return i <= r ? i * (q + 1) : r * (q + 1) + (i - r) * q;
  }
  std::uint64_t size(Value v) const { return static_cast<std::uint64_t>(v - 1) < r ? q + 1 : q; }
  Value value_of(std::uint64_t code) const {
    if (code < r * (q + 1)) return static_cast<Value>(code / (q + 1)) + 1;
    return static_cast<Value>(r + (code - r * (q + 1)) / q) + 1;
  }
};

// Weight of value v = sum over its block of codes of the product of per-bit weights.
class BlockWeights final : public ValueWeights {
 public:
  BlockWeights(const Blocks& blk, const std::vector<WeightsPtr>& bitw) : blk_(blk) {
    for (const auto& w : bitw) {
      w0_.push_back(w->at(1));
      w1_.push_back(w->at(2));
      ones_ = ones_ && w0_.back() == 1 && w1_.back() == 1;
    }
    suffix_.assign(static_cast<std::size_t>(blk_.bits) + 1, 1);
    for (int t = blk_.bits - 1; t >= 0; --t) suffix_[t] = suffix_[t + 1] * (w0_[t] + w1_[t]);
  }

  Integer at(Value v) const override {
    if (v < 1 || static_cast<std::uint64_t>(v) > blk_.n) return 0;
    if (ones_) return Integer(static_cast<unsigned long>(blk_.size(v)));
    return below(blk_.start(v) + blk_.size(v)) - below(blk_.start(v));
  }
  Integer total() const override { return suffix_[0]; }
  std::optional<std::vector<Value>> support(std::size_t limit) const override {
    if (ones_ && blk_.n > limit) return std::nullopt;
    std::vector<Value> out;
    for (std::uint64_t v = 1; v <= blk_.n; ++v) {
      if (at(static_cast<Value>(v)) != 0) {
        out.push_back(static_cast<Value>(v));
        if (out.size() > limit) return std::nullopt;
      }
    }
    return out;
  }
  std::size_t support_size_hint() const override {
    double codes = 1;
    for (std::size_t t = 0; t < w0_.size(); ++t) codes *= (w0_[t] != 0) + (w1_[t] != 0);
    return static_cast<std::size_t>(std::min<double>(codes, static_cast<double>(blk_.n)));
  }

 private:
  // sum of code weights over codes < x
  Integer below(std::uint64_t x) const {
    const auto N = static_cast<std::size_t>(blk_.bits);
    if (x >= (std::uint64_t{1} << N)) return suffix_[0];
    Integer acc = 0, prefix = 1;
    for (std::size_t t = 0; t < N && prefix != 0; ++t) {
      bool bit = (x >> (N - 1 - t)) & 1;
      if (bit) {
        acc += prefix * w0_[t] * suffix_[t + 1];
        prefix *= w1_[t];
      } else {
        prefix *= w0_[t];
      }
    }
    return acc;
  }

  Blocks blk_;
  std::vector<Integer> w0_, w1_, suffix_;
  bool ones_ = true;
};

class BinaryEncodedBody final : public Body {
 public:
  BinaryEncodedBody(Constraint src, Blocks blk) : src_(std::move(src)), blk_(blk) {}
  std::size_t arity() const override { return src_.domain().size() * static_cast<std::size_t>(blk_.bits); }
  bool contains(const std::vector<Value>& phi) const override {
    std::vector<Value> vals;
    const auto N = static_cast<std::size_t>(blk_.bits);
    for (std::size_t j = 0; j < src_.domain().size(); ++j) {
      std::uint64_t code = 0;
      for (std::size_t t = 0; t < N; ++t) code = (code << 1) | static_cast<std::uint64_t>(phi[j * N + t] - 1);
      vals.push_back(blk_.value_of(code));
    }
    return src_.contains(vals);
  }
  Integer weighted_count(const std::vector<WeightsPtr>& w, int) const override {
    const auto N = static_cast<std::size_t>(blk_.bits);
    std::vector<WeightsPtr> induced;
    for (std::size_t j = 0; j < src_.domain().size(); ++j) {
      std::vector<WeightsPtr> bitw(w.begin() + static_cast<std::ptrdiff_t>(j * N),
                                   w.begin() + static_cast<std::ptrdiff_t>((j + 1) * N));
      induced.push_back(std::make_shared<BlockWeights>(blk_, bitw));
    }
    return src_.weighted_count(induced);
  }
  nlohmann::json describe() const override {
    return {{"name", "binary_encoded"}, {"params", {{"bits", blk_.bits}, {"n", blk_.n}, {"source", src_.to_json()}}}};
  }

 private:
  Constraint src_;
  Blocks blk_;
};

}  // namespace

Elem BinaryReduction::encode_id(std::size_t y_index, int bit) const {
  return static_cast<Elem>(y_index * static_cast<std::size_t>(bits) + static_cast<std::size_t>(bit - 1));
}

Value binary_decode_value(const std::vector<Integer>& block_sizes, const std::vector<Value>& code) {
  std::uint64_t x = 0;
  for (auto c : code) x = (x << 1) | static_cast<std::uint64_t>(c - 1);
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < block_sizes.size(); ++i) {
    acc += block_sizes[i].get_ui();
    if (x < acc) return static_cast<Value>(i) + 1;
  }
  throw Error("binary code outside every block");
}

BinaryReduction binary_reduce(const Csp& c, const Rational& eps) {
  if (eps <= 0) throw Error("binary_reduce needs eps > 0");
  c.validate();
  BinaryReduction out;
  out.source_ground = c.ground;
  auto b = static_cast<unsigned>(std::max<std::size_t>(c.bound(), 1));
  Rational delta = eps / b;
  while (rpow(1 + delta, b) > 1 + eps) delta /= 2;
  out.delta = delta;
  const auto n = static_cast<std::uint64_t>(c.m);
  int N = 1;
  while (true) {
    if (N > 60) throw Error("binary_reduce: range too large");
    std::uint64_t total = std::uint64_t{1} << N;
    if (total >= n) {
      std::uint64_t ceil_block = (total + n - 1) / n;
      if (Rational(Integer(static_cast<unsigned long>(n * ceil_block))) <= (1 + delta) * Integer(static_cast<unsigned long>(total))) break;
    }
    ++N;
  }
  out.bits = N;
  Blocks blk;
  blk.bits = N;
  blk.n = n;
  blk.q = (std::uint64_t{1} << N) / n;
  blk.r = (std::uint64_t{1} << N) % n;
  for (Value v = 1; v <= c.m; ++v) out.block_sizes.emplace_back(static_cast<unsigned long>(blk.size(v)));

  std::map<Elem, std::size_t> index;
  for (std::size_t j = 0; j < c.ground.size(); ++j) index[c.ground[j]] = j;
  out.target.m = 2;
  for (std::size_t j = 0; j < c.ground.size(); ++j)
    for (int i = 1; i <= N; ++i) out.target.ground.push_back(out.encode_id(j, i));
  for (const auto& con : c.constraints) {
    std::vector<Elem> scope;
    for (Elem y : con.domain())
      for (int i = 1; i <= N; ++i) scope.push_back(out.encode_id(index.at(y), i));
    out.target.constraints.emplace_back(std::move(scope), 2, std::make_shared<BinaryEncodedBody>(con, blk), con.cap_bits());
  }

  Connection& tau = out.decode;
  tau.source = c.ground;
  tau.target = out.target.ground;
  for (std::size_t j = 0; j < c.ground.size(); ++j) {
    std::vector<Elem> s;
    for (int i = 1; i <= N; ++i) s.push_back(out.encode_id(j, i));
    tau.det[c.ground[j]] = std::move(s);
  }
  tau.rule = [blk](Elem, const View& view) -> std::optional<Value> {
    std::uint64_t code = 0;
    for (const auto& v : view) {
      if (!v || (*v != 1 && *v != 2)) return std::nullopt;
      code = (code << 1) | static_cast<std::uint64_t>(*v - 1);
    }
    return blk.value_of(code);
  };
  auto sizes = nlohmann::json::array();
  for (const auto& s : out.block_sizes) sizes.push_back(s.get_ui());
  tau.descriptor = {{"kind", "binary"},
                    {"params", {{"n", c.m}, {"bits", N}, {"eps", eps.get_str()}, {"delta", delta.get_str()}, {"blocks", sizes}}}};
  return out;
}

}  // namespace loclll
