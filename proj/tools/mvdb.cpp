// mvdb: compile an MV-index offline, answer queries online.
#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "mvdb/dblp.hpp"
#include "mvdb/io.hpp"
#include "mvdb/mvindex.hpp"
#include "mvdb/oracle.hpp"
#include "mvdb/serialize.hpp"

namespace fs = std::filesystem;
using namespace mvdb;

namespace {

struct Options {
  std::string project;
  std::string index;
  std::string engine = "ccmv";
  std::string query;
  bool timing = false;
  bool tsv = false;
  std::uint64_t seed = 1;
  std::size_t scale = 3;
  std::size_t advisors = 2;
  std::size_t years = 1;
  double tolerance = 1e-9;
  std::uint64_t world_cap = kDefaultWorldCap;
};

std::string index_path(const Options& o) {
  if (!o.index.empty()) return o.index;
  if (o.project.empty()) throw Error(ErrorCode::kUsage, "--index or --project is required");
  return (fs::path(o.project) / "index.mvix").string();
}

void require_project(const Options& o) {
  if (o.project.empty()) throw Error(ErrorCode::kUsage, "--project is required");
}

std::string answer_text(const Instance& inst, const std::vector<ConstId>& values) {
  std::string s = "(";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ",";
    s += to_string(inst.dictionary().value(values[i]));
  }
  return s + ")";
}

std::string keys_text(const Constituent& c) {
  if (c.key_values.empty()) return "-";
  std::string s;
  for (std::size_t i = 0; i < c.key_values.size(); ++i) {
    if (i) s += ",";
    s += to_string(c.key_values[i]);
  }
  return s;
}

void print_constituents(const MvIndex& idx, bool tsv) {
  if (tsv) std::cout << "constituent\tkey\tsize\twidth\tmin_rank\tmax_rank\tprob_under\n";
  std::size_t total = 0;
  for (std::size_t i = 0; i < idx.constituents.size(); ++i) {
    const auto& c = idx.constituents[i];
    total += c.size();
    if (tsv) {
      std::cout << i << '\t' << keys_text(c) << '\t' << c.size() << '\t' << c.width << '\t' << c.min_rank << '\t'
                << c.max_rank << '\t' << format_weight(c.root_probability()) << '\n';
    } else {
      std::printf("constituent %zu  key=%s  size=%zu  width=%zu  ranks=[%u,%u]  probUnder=%.12g\n", i,
                  keys_text(c).c_str(), c.size(), c.width, c.min_rank, c.max_rank, c.root_probability());
    }
  }
  if (!tsv) {
    std::printf("constituents %zu  total size %zu  variables %zu\n", idx.constituents.size(), total,
                idx.order->size());
    std::printf("P0(W) = %.17g  P0(not W) = %.17g\n", idx.p0_w, idx.p0_not_w);
  }
}

int cmd_compile(const Options& o) {
  require_project(o);
  auto t0 = std::chrono::steady_clock::now();
  Mvdb db = load_project_dir(o.project);
  auto tr = build_indb(db);
  BuildStats st;
  MvIndex idx = build_index(tr, nullptr, &st);
  const std::string path = index_path(o);
  write_index_file(path, idx);
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (idx.constituents.empty()) std::cerr << "warning: no view tuples; the index has zero constituents\n";
  print_constituents(idx, o.tsv);
  if (!o.tsv) {
    std::printf("concatenations %zu  syntheses %zu  refusals %zu  merged %zu\n", st.compile.concatenations,
                st.compile.syntheses, st.compile.refusals, st.merged);
    std::printf("wrote %s in %.3f ms\n", path.c_str(), ms);
  }
  return 0;
}

int cmd_query(const Options& o) {
  require_project(o);
  if (o.query.empty()) throw Error(ErrorCode::kUsage, "query text is required");
  Mvdb db = load_project_dir(o.project);
  auto tr = build_indb(db);
  Ucq q = parse_query(o.query, tr.indb);
  check_query_relations(q, tr);

  struct Row {
    std::vector<ConstId> answer;
    double p;
    QueryTiming t;
  };
  std::vector<Row> rows;
  if (o.engine == "oracle") {
    MlnOracle oracle(db, o.world_cap);
    for (auto& a : answer_tuples(q, db.instance)) rows.push_back({a, oracle.probability(substitute(q, a)), {}});
  } else if (o.engine == "mv" || o.engine == "ccmv") {
    MvIndex idx = read_index_file(index_path(o), &tr.indb);
    MvEvaluator ev(tr, idx, o.engine == "mv" ? Engine::kMv : Engine::kCcMv);
    for (auto& a : answer_tuples(q, tr.indb)) {
      double p = query_probability(substitute(q, a), tr, ev);
      rows.push_back({a, p, ev.last_timing});
    }
  } else {
    throw Error(ErrorCode::kUsage, "unknown engine '" + o.engine + "' (expected mv, ccmv or oracle)");
  }

  if (o.tsv) {
    std::cout << "answer\tprobability";
    if (o.timing) std::cout << "\tlineage_us\tobdd_us\tintersect_us";
    std::cout << '\n';
  }
  for (const auto& r : rows) {
    if (r.p < -o.tolerance || r.p > 1 + o.tolerance) {
      std::cerr << "warning: probability " << r.p << " outside [0,1] beyond tolerance\n";
    }
    std::string a = answer_text(tr.indb, r.answer);
    if (o.tsv) {
      std::cout << a << '\t' << format_weight(r.p);
      if (o.timing) std::printf("\t%.1f\t%.1f\t%.1f", r.t.lineage_us, r.t.obdd_us, r.t.intersect_us);
      std::cout << '\n';
    } else {
      std::printf("%-24s %.15g", a.c_str(), r.p);
      if (o.timing) std::printf("   lineage %.1fus  obdd %.1fus  intersect %.1fus", r.t.lineage_us, r.t.obdd_us,
                                r.t.intersect_us);
      std::printf("\n");
    }
  }
  return 0;
}

int cmd_oracle(const Options& o) {
  require_project(o);
  if (o.query.empty()) throw Error(ErrorCode::kUsage, "query text is required");
  Mvdb db = load_project_dir(o.project);
  Ucq q = parse_query(o.query, db.instance);
  bool ok = true;
  if (o.tsv) std::cout << "query\tlhs\trhs\tdelta\n";
  for (auto& a : answer_tuples(q, db.instance)) {
    auto r = theorem1_check(db, substitute(q, a), o.world_cap);
    ok = ok && r.delta <= o.tolerance;
    std::string name = q.name + answer_text(db.instance, a);
    if (o.tsv) {
      std::cout << name << '\t' << format_weight(r.lhs) << '\t' << format_weight(r.rhs) << '\t'
                << format_weight(r.delta) << '\n';
    } else {
      std::printf("%-24s mln=%.15g  indb=%.15g  delta=%.3g%s\n", name.c_str(), r.lhs, r.rhs, r.delta,
                  r.delta <= o.tolerance ? "" : "  MISMATCH");
    }
  }
  if (!ok) std::cerr << "warning: Theorem 1 delta above tolerance " << o.tolerance << '\n';
  return 0;
}

int cmd_stats(const Options& o) {
  MvIndex idx = read_index_file(index_path(o));
  print_constituents(idx, o.tsv);
  return 0;
}

int cmd_gen_dblp(const Options& o) {
  require_project(o);
  DblpConfig cfg;
  cfg.seed = o.seed;
  cfg.students = o.scale;
  cfg.advisors_per_student = o.advisors;
  cfg.years_per_student = o.years;
  write_project_dir(o.project, gen_dblp(cfg));
  if (!o.tsv) std::printf("wrote %s (%zu students)\n", o.project.c_str(), cfg.students);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact query evaluation over MarkoView databases"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* c) {
    c->add_option("--project", o.project, "project directory");
    c->add_option("--index", o.index, "index file (default PROJECT/index.mvix)");
    c->add_flag("--tsv", o.tsv, "machine-readable output");
    c->add_option("--tolerance", o.tolerance, "numeric tolerance")->check(CLI::PositiveNumber);
    c->add_option("--world-cap", o.world_cap, "max worlds enumerated by the oracle");
  };
  auto* compile = app.add_subcommand("compile", "build the MV-index for a project");
  common(compile);
  compile->add_flag("--timing", o.timing);
  auto* query = app.add_subcommand("query", "answer a UCQ");
  common(query);
  query->add_option("query", o.query, "query text, e.g. 'Q(x) :- R(x), S(x,y)'");
  query->add_option("--engine", o.engine, "mv, ccmv or oracle");
  query->add_flag("--timing", o.timing, "per-phase microseconds");
  auto* oracle = app.add_subcommand("oracle", "compare MLN enumeration with the INDB translation");
  common(oracle);
  oracle->add_option("query", o.query, "query text");
  auto* stats = app.add_subcommand("stats", "describe an index file");
  common(stats);
  auto* gen = app.add_subcommand("gen-dblp", "write a synthetic DBLP-like project");
  common(gen);
  gen->add_option("--seed", o.seed);
  gen->add_option("--scale", o.scale, "number of students");
  gen->add_option("--advisors", o.advisors, "advisor candidates per student");
  gen->add_option("--years", o.years, "student-year candidates per student");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  try {
    if (*compile) return cmd_compile(o);
    if (*query) return cmd_query(o);
    if (*oracle) return cmd_oracle(o);
    if (*stats) return cmd_stats(o);
    if (*gen) return cmd_gen_dblp(o);
  } catch (const Error& e) {
    std::cerr << "mvdb: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "mvdb: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
