#pragma once

#include <zlib.h>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "mvdb/mvindex.hpp"

namespace mvdb {

inline constexpr char kIndexMagic[4] = {'M', 'V', 'I', 'X'};
inline constexpr std::uint32_t kIndexVersion = 1;

namespace detail {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }
  void value(const Value& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
      u8(0);
      i64(*i);
    } else {
      u8(1);
      str(std::get<std::string>(v));
    }
  }
  std::vector<std::uint8_t>& bytes() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  ByteReader(const std::uint8_t* data, std::size_t size) : p_(data), end_(data + size) {}

  std::uint8_t u8() { return take(1)[0]; }
  std::uint32_t u32() {
    const auto* b = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    const auto* b = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    std::uint32_t n = u32();
    const auto* b = take(n);
    return {reinterpret_cast<const char*>(b), n};
  }
  Value value() {
    std::uint8_t tag = u8();
    if (tag == 0) return i64();
    if (tag == 1) return str();
    throw Error(ErrorCode::kFormat, "index file: bad value tag");
  }
  // element count, checked against the bytes left
  std::uint32_t count(std::size_t min_bytes_each) {
    std::uint32_t n = u32();
    if (min_bytes_each && n > remaining() / min_bytes_each) throw Error(ErrorCode::kFormat, "index file truncated");
    return n;
  }
  std::size_t remaining() const { return static_cast<std::size_t>(end_ - p_); }

 private:
  const std::uint8_t* take(std::size_t n) {
    if (remaining() < n) throw Error(ErrorCode::kFormat, "index file truncated");
    const auto* b = p_;
    p_ += n;
    return b;
  }
  const std::uint8_t* p_;
  const std::uint8_t* end_;
};

inline std::uint32_t crc(const std::uint8_t* data, std::size_t n) {
  return static_cast<std::uint32_t>(::crc32(0L, data, static_cast<uInt>(n)));
}

}  // namespace detail

// [magic | version | header | layouts | inter | intra | crc32], little-endian.
inline std::vector<std::uint8_t> serialize(const MvIndex& idx) {
  detail::ByteWriter w;
  for (char ch : kIndexMagic) w.u8(static_cast<std::uint8_t>(ch));
  w.u32(kIndexVersion);
  // header
  w.f64(idx.p0_w);
  w.f64(idx.p0_not_w);
  w.u64(idx.schema_digest);
  w.u32(static_cast<std::uint32_t>(idx.pi.perms.size()));
  for (const auto& perm : idx.pi.perms) {
    w.u32(static_cast<std::uint32_t>(perm.size()));
    for (auto p : perm) w.u32(static_cast<std::uint32_t>(p));
  }
  w.u32(static_cast<std::uint32_t>(idx.order_keys.size()));
  for (std::size_t r = 0; r < idx.order_keys.size(); ++r) {
    const auto& k = idx.order_keys[r];
    w.str(k.relation);
    w.u32(static_cast<std::uint32_t>(k.values.size()));
    for (const auto& v : k.values) w.value(v);
    w.f64(idx.prob.at(r));
  }
  // layouts
  w.u32(static_cast<std::uint32_t>(idx.constituents.size()));
  for (const auto& c : idx.constituents) {
    w.u32(static_cast<std::uint32_t>(c.key_values.size()));
    for (const auto& k : c.key_values) w.value(k);
    w.u32(c.root);
    w.u32(c.min_rank);
    w.u32(c.max_rank);
    w.u64(c.width);
    w.u32(static_cast<std::uint32_t>(c.nodes.size()));
    for (const auto& n : c.nodes) {
      w.u32(n.rank);
      w.u32(n.lo);
      w.u32(n.hi);
      w.f64(n.prob_under);
      w.f64(n.reach);
    }
    w.u32(static_cast<std::uint32_t>(c.levels.size()));
    for (const auto& lv : c.levels) {
      w.u32(lv.rank);
      w.u32(lv.nodes_begin);
      w.u32(lv.nodes_end);
      w.u32(lv.entries_begin);
      w.u32(lv.entries_end);
      w.f64(lv.true_mass);
      w.u8(lv.clean ? 1 : 0);
    }
    w.u32(static_cast<std::uint32_t>(c.entries.size()));
    for (const auto& e : c.entries) {
      w.u32(e.node);
      w.f64(e.mass);
    }
  }
  // inter index
  w.u32(static_cast<std::uint32_t>(idx.inter.size()));
  for (const auto& [r, c] : idx.inter) {
    w.u32(r);
    w.u32(c);
  }
  // intra index
  for (const auto& c : idx.constituents) {
    w.u32(static_cast<std::uint32_t>(c.intra.size()));
    for (auto u : c.intra) w.u32(u);
  }
  auto& bytes = w.bytes();
  std::uint32_t sum = detail::crc(bytes.data(), bytes.size());
  w.u32(sum);
  return std::move(bytes);
}

// Resolves the stored order against `inst` when given; without an instance
// the order uses placeholder tuple ids 0..n-1 (enough for stats).
inline MvIndex deserialize(const std::vector<std::uint8_t>& bytes, const Instance* inst = nullptr) {
  if (bytes.size() < 12) throw Error(ErrorCode::kFormat, "index file truncated");
  if (std::memcmp(bytes.data(), kIndexMagic, 4) != 0) throw Error(ErrorCode::kFormat, "not an MV-index file");
  detail::ByteReader head(bytes.data() + 4, 4);
  std::uint32_t version = head.u32();
  if (version != kIndexVersion) {
    throw Error(ErrorCode::kFormat, "index format version " + std::to_string(version) + " is not supported");
  }
  detail::ByteReader tail(bytes.data() + bytes.size() - 4, 4);
  if (tail.u32() != detail::crc(bytes.data(), bytes.size() - 4)) {
    throw Error(ErrorCode::kFormat, "index file checksum mismatch");
  }
  detail::ByteReader r(bytes.data() + 8, bytes.size() - 12);
  MvIndex idx;
  idx.p0_w = r.f64();
  idx.p0_not_w = r.f64();
  idx.schema_digest = r.u64();
  idx.pi.perms.resize(r.count(4));
  for (auto& perm : idx.pi.perms) {
    perm.resize(r.count(4));
    for (auto& p : perm) p = r.u32();
  }
  const std::uint32_t n = r.count(4 + 4 + 8);
  if (inst) {
    if (schema_digest(inst->schema()) != idx.schema_digest) {
      throw Error(ErrorCode::kFormat, "index was compiled against a different schema");
    }
    if (inst->probabilistic_tuples().size() != n) throw Error(ErrorCode::kFormat, "index is stale: tuple count differs");
  }
  std::vector<TupleId> by_rank;
  for (std::uint32_t i = 0; i < n; ++i) {
    TupleKey k;
    k.relation = r.str();
    k.values.resize(r.count(1));
    for (auto& v : k.values) v = r.value();
    idx.prob.push_back(r.f64());
    if (inst) {
      auto rel = inst->schema().find(k.relation);
      std::optional<TupleId> t;
      if (rel) {
        std::vector<ConstId> vals;
        for (const auto& v : k.values) {
          auto c = inst->dictionary().find(v);
          if (!c) break;
          vals.push_back(*c);
        }
        if (vals.size() == k.values.size()) t = inst->find_tuple(*rel, vals);
      }
      if (!t) throw Error(ErrorCode::kFormat, "index refers to a tuple missing from the database");
      if (inst->probability(*t) != idx.prob.back()) throw Error(ErrorCode::kFormat, "index is stale: weights differ");
      by_rank.push_back(*t);
    } else {
      by_rank.push_back(i);
    }
    idx.order_keys.push_back(std::move(k));
  }
  idx.order = std::make_shared<const VariableOrder>(std::move(by_rank));

  idx.constituents.resize(r.count(8));
  for (auto& c : idx.constituents) {
    c.key_values.resize(r.count(1));
    for (auto& k : c.key_values) {
      k = r.value();
      if (inst) {
        auto id = inst->dictionary().find(k);
        if (!id) throw Error(ErrorCode::kFormat, "index key missing from the database");
        c.keys.push_back(*id);
      }
    }
    c.root = r.u32();
    c.min_rank = r.u32();
    c.max_rank = r.u32();
    c.width = r.u64();
    c.nodes.resize(r.count(28));
    for (auto& nd : c.nodes) {
      nd.rank = r.u32();
      nd.lo = r.u32();
      nd.hi = r.u32();
      nd.prob_under = r.f64();
      nd.reach = r.f64();
      for (auto child : {nd.lo, nd.hi})
        if (!is_layout_sink(child) && child >= c.nodes.size()) throw Error(ErrorCode::kFormat, "bad node offset");
    }
    c.levels.resize(r.count(29));
    for (auto& lv : c.levels) {
      lv.rank = r.u32();
      lv.nodes_begin = r.u32();
      lv.nodes_end = r.u32();
      lv.entries_begin = r.u32();
      lv.entries_end = r.u32();
      lv.true_mass = r.f64();
      lv.clean = r.u8() != 0;
    }
    c.entries.resize(r.count(12));
    for (auto& e : c.entries) {
      e.node = r.u32();
      e.mass = r.f64();
    }
  }
  idx.inter.resize(r.count(8));
  for (auto& [rank, c] : idx.inter) {
    rank = r.u32();
    c = r.u32();
  }
  for (auto& c : idx.constituents) {
    c.intra.resize(r.count(4));
    for (auto& u : c.intra) u = r.u32();
  }
  if (r.remaining() != 0) throw Error(ErrorCode::kFormat, "trailing bytes in index file");
  return idx;
}

inline void write_index_file(const std::string& path, const MvIndex& idx) {
  auto bytes = serialize(idx);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInput, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline MvIndex read_index_file(const std::string& path, const Instance* inst = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInput, "cannot read index file " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes, inst);
}

}  // namespace mvdb
