#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace loclll {

// Finite structured values: integers, tuples of labels and finite sets of labels.
class Label {
 public:
  enum class Kind : std::uint8_t { Int = 0, Tuple = 1, Set = 2 };

  Label() = default;
  Label(std::int64_t v) : value_(v) {}  // NOLINT(google-explicit-constructor)

  static Label integer(std::int64_t v) { return Label(v); }
  static Label tuple(std::vector<Label> items);
  static Label set(std::vector<Label> items);

  Kind kind() const { return kind_; }
  bool is_int() const { return kind_ == Kind::Int; }
  bool is_tuple() const { return kind_ == Kind::Tuple; }
  bool is_set() const { return kind_ == Kind::Set; }
  std::int64_t as_int() const;
  const std::vector<Label>& items() const { return items_; }

  std::strong_ordering operator<=>(const Label& o) const;
  bool operator==(const Label& o) const { return (*this <=> o) == 0; }

  void encode(std::string& out) const;
  std::string debug() const;

  nlohmann::json to_json() const;
  static Label from_json(const nlohmann::json& j);

 private:
  Kind kind_ = Kind::Int;
  std::int64_t value_ = 0;
  std::vector<Label> items_;
};

}  // namespace loclll
