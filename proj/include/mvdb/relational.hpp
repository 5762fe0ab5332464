#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "mvdb/error.hpp"

namespace mvdb {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Odds to probability: p = w / (1 + w). Deterministic weight (inf) maps to 1.
inline double weight_to_probability(double w) {
  if (std::isinf(w) && w > 0) return 1.0;
  if (w == -1.0 || std::isnan(w) || std::isinf(w)) {
    throw Error(ErrorCode::kDegenerateWeight,
                "weight " + std::to_string(w) + " has no probability");
  }
  return w / (1.0 + w);
}

// Probability to odds: w = p / (1 - p); p = 1 maps to inf.
inline double probability_to_weight(double p) {
  if (p == 1.0) return kInf;
  return p / (1.0 - p);
}

// A constant in the active domain.
using Value = std::variant<std::int64_t, std::string>;

inline std::string to_string(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

using ConstId = std::uint32_t;
using RelId = std::uint32_t;
using TupleId = std::uint32_t;

inline constexpr ConstId kMissingConst = std::numeric_limits<ConstId>::max();

// Interns constants; interning order is the active-domain order.
class Dictionary {
 public:
  ConstId intern(const Value& v) {
    auto [it, inserted] = ids_.try_emplace(v, static_cast<ConstId>(values_.size()));
    if (inserted) values_.push_back(v);
    return it->second;
  }

  std::optional<ConstId> find(const Value& v) const {
    auto it = ids_.find(v);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  const Value& value(ConstId id) const { return values_.at(id); }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<Value> values_;
  std::unordered_map<Value, ConstId> ids_;
};

enum class AttrType { kInt, kString };
enum class RelationKind { kDeterministic, kProbabilistic, kViewAux };

struct Attribute {
  std::string name;
  AttrType type = AttrType::kString;
};

struct RelationSchema {
  std::string name;
  std::vector<Attribute> attributes;
  std::vector<std::size_t> key;  // attribute positions
  RelationKind kind = RelationKind::kProbabilistic;

  std::size_t arity() const { return attributes.size(); }
};

class Schema {
 public:
  RelId add(RelationSchema rel) {
    if (find(rel.name)) {
      throw Error(ErrorCode::kInput, "duplicate relation " + rel.name);
    }
    if (rel.key.empty()) {
      for (std::size_t i = 0; i < rel.arity(); ++i) rel.key.push_back(i);
    }
    auto id = static_cast<RelId>(relations_.size());
    by_name_.emplace(rel.name, id);
    relations_.push_back(std::move(rel));
    return id;
  }

  std::optional<RelId> find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
  }

  const RelationSchema& relation(RelId id) const { return relations_.at(id); }
  std::size_t size() const { return relations_.size(); }
  const std::vector<RelationSchema>& relations() const { return relations_; }

  // Relations sorted by (arity, name); this fixes tie order among tuples
  // whose permuted value sequences coincide.
  std::vector<RelId> arity_order() const {
    std::vector<RelId> ids(relations_.size());
    for (RelId i = 0; i < ids.size(); ++i) ids[i] = i;
    std::sort(ids.begin(), ids.end(), [&](RelId a, RelId b) {
      const auto& ra = relations_[a];
      const auto& rb = relations_[b];
      if (ra.arity() != rb.arity()) return ra.arity() < rb.arity();
      return ra.name < rb.name;
    });
    return ids;
  }

 private:
  std::vector<RelationSchema> relations_;
  std::unordered_map<std::string, RelId> by_name_;
};

struct TupleRecord {
  RelId relation = 0;
  std::vector<ConstId> values;
  double weight = kInf;
};

namespace detail {

struct TupleKeyHash {
  std::size_t operator()(const std::pair<RelId, std::vector<ConstId>>& k) const {
    std::size_t h = std::hash<RelId>{}(k.first);
    for (ConstId c : k.second) h ^= std::hash<ConstId>{}(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

}  // namespace detail

// A set of possible tuples with weights. Deterministic tuples carry weight
// inf and are never Boolean variables.
class Instance {
 public:
  Instance() = default;
  explicit Instance(Schema schema) : schema_(std::move(schema)) { resize_indexes(); }

  const Schema& schema() const { return schema_; }
  const Dictionary& dictionary() const { return dict_; }
  Dictionary& dictionary() { return dict_; }

  RelId add_relation(RelationSchema rel) {
    RelId id = schema_.add(std::move(rel));
    resize_indexes();
    return id;
  }

  TupleId add_tuple(RelId rel, std::vector<ConstId> values, double weight) {
    const auto& rs = schema_.relation(rel);
    if (values.size() != rs.arity()) {
      throw Error(ErrorCode::kInput, "arity mismatch for tuple of " + rs.name);
    }
    if (std::isnan(weight) || weight < 0) {
      if (rs.kind != RelationKind::kViewAux || std::isnan(weight)) {
        throw Error(ErrorCode::kInput, "negative weight for tuple of " + rs.name);
      }
    }
    if (rs.kind == RelationKind::kDeterministic && !std::isinf(weight)) {
      throw Error(ErrorCode::kInput, "deterministic relation " + rs.name + " requires weight inf");
    }
    auto key = std::make_pair(rel, values);
    if (lookup_.count(key)) {
      throw Error(ErrorCode::kInput, "duplicate tuple in " + rs.name);
    }
    auto id = static_cast<TupleId>(tuples_.size());
    lookup_.emplace(std::move(key), id);
    for (std::size_t pos = 0; pos < values.size(); ++pos) {
      position_index_[rel][pos][values[pos]].push_back(id);
    }
    by_relation_[rel].push_back(id);
    tuples_.push_back(TupleRecord{rel, std::move(values), weight});
    return id;
  }

  std::optional<TupleId> find_tuple(RelId rel, const std::vector<ConstId>& values) const {
    auto it = lookup_.find(std::make_pair(rel, values));
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const { return tuples_.size(); }
  const TupleRecord& tuple(TupleId id) const { return tuples_.at(id); }
  const std::vector<TupleRecord>& tuples() const { return tuples_; }
  const std::vector<TupleId>& relation_tuples(RelId rel) const { return by_relation_.at(rel); }

  // Tuples of `rel` with `value` at `pos`.
  std::span<const TupleId> tuples_with(RelId rel, std::size_t pos, ConstId value) const {
    const auto& m = position_index_.at(rel).at(pos);
    auto it = m.find(value);
    if (it == m.end()) return {};
    return it->second;
  }

  bool is_probabilistic(TupleId id) const { return !std::isinf(tuples_.at(id).weight); }
  double weight(TupleId id) const { return tuples_.at(id).weight; }
  double probability(TupleId id) const { return weight_to_probability(tuples_.at(id).weight); }

  std::vector<TupleId> probabilistic_tuples() const {
    std::vector<TupleId> out;
    for (TupleId i = 0; i < tuples_.size(); ++i)
      if (is_probabilistic(i)) out.push_back(i);
    return out;
  }

  bool relation_is_deterministic(RelId rel) const {
    return schema_.relation(rel).kind == RelationKind::kDeterministic;
  }

  std::string tuple_to_string(TupleId id) const {
    const auto& t = tuples_.at(id);
    std::string s = schema_.relation(t.relation).name + "(";
    for (std::size_t i = 0; i < t.values.size(); ++i) {
      if (i) s += ",";
      s += to_string(dict_.value(t.values[i]));
    }
    return s + ")";
  }

 private:
  void resize_indexes() {
    by_relation_.resize(schema_.size());
    position_index_.resize(schema_.size());
    for (RelId r = 0; r < schema_.size(); ++r) {
      position_index_[r].resize(schema_.relation(r).arity());
    }
  }

  Schema schema_;
  Dictionary dict_;
  std::vector<TupleRecord> tuples_;
  std::unordered_map<std::pair<RelId, std::vector<ConstId>>, TupleId, detail::TupleKeyHash> lookup_;
  std::vector<std::vector<TupleId>> by_relation_;
  std::vector<std::vector<std::unordered_map<ConstId, std::vector<TupleId>>>> position_index_;
};

// All possible tuples, weights forgotten.
inline std::vector<std::string> possible_instance(const Instance& inst) {
  std::vector<std::string> out;
  out.reserve(inst.size());
  for (TupleId i = 0; i < inst.size(); ++i) out.push_back(inst.tuple_to_string(i));
  return out;
}

}  // namespace mvdb
