#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mvdb/parser.hpp"
#include "mvdb/translate.hpp"

namespace mvdb {

// Text of a project: schema.txt, views.txt and data/NAME.tsv.
struct ProjectText {
  std::string schema;
  std::string views;
  std::map<std::string, std::string> data;  // relation name -> TSV
};

inline std::string format_weight(double w) {
  if (std::isinf(w)) return w > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, w);
  return std::string(buf, res.ptr);
}

inline double parse_weight(std::string_view s) {
  if (s == "inf" || s == "∞") return kInf;
  double w = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), w);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kInput, "bad weight '" + std::string(s) + "'");
  }
  return w;
}

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

inline std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

inline bool skip_line(const std::string& t) { return t.empty() || t[0] == '#'; }

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline Error at_line(const std::string& file, std::size_t line, const Error& e) {
  return Error(e.code(), file + ":" + std::to_string(line) + ": " + e.what());
}

// relation NAME(attr:type, ...) key(attr, ...) [deterministic|probabilistic]
inline RelationSchema parse_relation_line(const std::string& line) {
  auto bad = [](const std::string& msg) { return Error(ErrorCode::kInput, msg); };
  std::string s = trim(line);
  if (s.rfind("relation", 0) != 0) throw bad("expected 'relation'");
  s = trim(s.substr(8));
  auto open = s.find('(');
  auto close = s.find(')');
  if (open == std::string::npos || close == std::string::npos || close < open) throw bad("expected NAME(attr:type, ...)");
  RelationSchema rel;
  rel.name = trim(s.substr(0, open));
  if (rel.name.empty()) throw bad("missing relation name");
  for (const auto& part : split(s.substr(open + 1, close - open - 1), ',')) {
    auto p = trim(part);
    if (p.empty()) continue;
    auto colon = p.find(':');
    if (colon == std::string::npos) throw bad("attribute '" + p + "' has no type");
    Attribute a{trim(p.substr(0, colon)), AttrType::kInt};
    auto type = trim(p.substr(colon + 1));
    if (type == "int") a.type = AttrType::kInt;
    else if (type == "string") a.type = AttrType::kString;
    else throw bad("unknown type '" + type + "'");
    rel.attributes.push_back(a);
  }
  std::string rest = trim(s.substr(close + 1));
  rel.kind = RelationKind::kProbabilistic;
  if (rest.rfind("key", 0) == 0) {
    auto ko = rest.find('(');
    auto kc = rest.find(')');
    if (ko == std::string::npos || kc == std::string::npos) throw bad("bad key clause");
    for (const auto& part : split(rest.substr(ko + 1, kc - ko - 1), ',')) {
      auto p = trim(part);
      if (p.empty()) continue;
      std::size_t pos = 0;
      while (pos < rel.attributes.size() && rel.attributes[pos].name != p) ++pos;
      if (pos == rel.attributes.size()) throw bad("key attribute '" + p + "' is not declared");
      rel.key.push_back(pos);
    }
    rest = trim(rest.substr(kc + 1));
  }
  if (rest == "deterministic") rel.kind = RelationKind::kDeterministic;
  else if (rest == "probabilistic" || rest.empty()) rel.kind = RelationKind::kProbabilistic;
  else throw bad("unexpected '" + rest + "'");
  return rel;
}

}  // namespace detail

inline Schema parse_schema(const std::string& text, const std::string& file = "schema.txt") {
  Schema schema;
  auto lines = detail::lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto t = detail::trim(lines[i]);
    if (detail::skip_line(t)) continue;
    try {
      schema.add(detail::parse_relation_line(t));
    } catch (const Error& e) {
      throw detail::at_line(file, i + 1, e);
    }
  }
  return schema;
}

// Rows are tab separated: constants then a weight column. Deterministic
// relations may omit the weight.
inline void load_tsv(Instance& inst, RelId rel, const std::string& text, const std::string& file) {
  const auto& rs = inst.schema().relation(rel);
  auto lines = detail::lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (detail::skip_line(detail::trim(lines[i]))) continue;
    try {
      auto cols = detail::split(lines[i], '\t');
      double w = kInf;
      if (cols.size() == rs.arity() + 1) {
        w = parse_weight(detail::trim(cols.back()));
        cols.pop_back();
      } else if (cols.size() != rs.arity() || rs.kind != RelationKind::kDeterministic) {
        throw Error(ErrorCode::kInput, "expected " + std::to_string(rs.arity()) + " values and a weight");
      }
      std::vector<ConstId> vals;
      for (std::size_t j = 0; j < cols.size(); ++j) {
        if (rs.attributes[j].type == AttrType::kInt) {
          auto c = detail::trim(cols[j]);
          std::int64_t v = 0;
          auto res = std::from_chars(c.data(), c.data() + c.size(), v);
          if (res.ec != std::errc() || res.ptr != c.data() + c.size()) {
            throw Error(ErrorCode::kInput, "bad integer '" + c + "' for " + rs.attributes[j].name);
          }
          vals.push_back(inst.dictionary().intern(Value{v}));
        } else {
          vals.push_back(inst.dictionary().intern(Value{cols[j]}));
        }
      }
      if (w < 0) throw Error(ErrorCode::kInput, "negative weight");
      inst.add_tuple(rel, std::move(vals), w);
    } catch (const Error& e) {
      throw detail::at_line(file, i + 1, e);
    }
  }
}

inline std::vector<MarkoView> parse_views(const std::string& text, const Instance& inst,
                                          const std::string& file = "views.txt") {
  std::vector<MarkoView> out;
  auto lines = detail::lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto t = detail::trim(lines[i]);
    if (detail::skip_line(t)) continue;
    try {
      out.push_back(parse_view(t, inst));
    } catch (const Error& e) {
      throw detail::at_line(file, i + 1, e);
    }
  }
  return out;
}

// Data is loaded in schema order so constants are interned deterministically.
inline Mvdb load_project(const ProjectText& p) {
  Mvdb db{Instance(parse_schema(p.schema)), {}};
  for (RelId r = 0; r < db.instance.schema().size(); ++r) {
    const auto& name = db.instance.schema().relation(r).name;
    auto it = p.data.find(name);
    if (it != p.data.end()) load_tsv(db.instance, r, it->second, "data/" + name + ".tsv");
  }
  for (const auto& [name, text] : p.data) {
    if (!db.instance.schema().find(name)) throw Error(ErrorCode::kInput, "data/" + name + ".tsv: undeclared relation");
  }
  db.views = parse_views(p.views, db.instance);
  return db;
}

namespace detail {

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInput, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

inline ProjectText read_project_dir(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  ProjectText p;
  p.schema = detail::slurp(dir / "schema.txt");
  if (fs::exists(dir / "views.txt")) p.views = detail::slurp(dir / "views.txt");
  if (fs::is_directory(dir / "data")) {
    for (const auto& e : fs::directory_iterator(dir / "data")) {
      if (e.path().extension() != ".tsv") continue;
      p.data[e.path().stem().string()] = detail::slurp(e.path());
    }
  }
  return p;
}

inline void write_project_dir(const std::filesystem::path& dir, const ProjectText& p) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "data");
  auto put = [](const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::kInput, "cannot write " + path.string());
    out << text;
  };
  put(dir / "schema.txt", p.schema);
  put(dir / "views.txt", p.views);
  for (const auto& [name, text] : p.data) put(dir / "data" / (name + ".tsv"), text);
}

inline Mvdb load_project_dir(const std::filesystem::path& dir) { return load_project(read_project_dir(dir)); }

}  // namespace mvdb
