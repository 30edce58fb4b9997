#include "loclll/label.hpp"

#include <algorithm>

#include "loclll/common.hpp"

namespace loclll {

Label Label::tuple(std::vector<Label> items) {
  Label l;
  l.kind_ = Kind::Tuple;
  l.items_ = std::move(items);
  return l;
}

Label Label::set(std::vector<Label> items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  Label l;
  l.kind_ = Kind::Set;
  l.items_ = std::move(items);
  return l;
}

std::int64_t Label::as_int() const {
  if (kind_ != Kind::Int) throw Error("label is not an integer: " + debug());
  return value_;
}

std::strong_ordering Label::operator<=>(const Label& o) const {
  if (kind_ != o.kind_) return kind_ <=> o.kind_;
  if (kind_ == Kind::Int) return value_ <=> o.value_;
  return std::lexicographical_compare_three_way(items_.begin(), items_.end(), o.items_.begin(), o.items_.end());
}

namespace {

void put_varint(std::string& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<char>((v & 0x7f) | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<char>(v));
}

}  // namespace

void Label::encode(std::string& out) const {
  out.push_back(static_cast<char>(kind_));
  if (kind_ == Kind::Int) {
    // zigzag so negative reserved tags stay compact
    auto z = (static_cast<std::uint64_t>(value_) << 1) ^ static_cast<std::uint64_t>(value_ >> 63);
    put_varint(out, z);
    return;
  }
  put_varint(out, items_.size());
  for (const auto& it : items_) it.encode(out);
}

std::string Label::debug() const { return to_json().dump(); }

nlohmann::json Label::to_json() const {
  if (kind_ == Kind::Int) return value_;
  auto arr = nlohmann::json::array();
  for (const auto& it : items_) arr.push_back(it.to_json());
  if (kind_ == Kind::Tuple) return arr;
  return nlohmann::json{{"set", arr}};
}

Label Label::from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return Label(j.get<std::int64_t>());
  std::vector<Label> items;
  if (j.is_array()) {
    for (const auto& e : j) items.push_back(from_json(e));
    return tuple(std::move(items));
  }
  if (j.is_object() && j.contains("set") && j.size() == 1) {
    for (const auto& e : j.at("set")) items.push_back(from_json(e));
    return set(std::move(items));
  }
  throw Error("malformed label: " + j.dump());
}

}  // namespace loclll
