#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mvdb/io.hpp"

namespace mvdb {

// Desk-scale analogue of the paper's DBLP schema. Coauthored is the
// pre-materialized count(pid) aggregate used by Advisor's weight and V1.
struct DblpConfig {
  std::uint64_t seed = 1;
  std::size_t students = 3;
  std::size_t advisors_per_student = 2;
  std::size_t years_per_student = 1;
  std::size_t professors = 0;  // 0: max(3, students / 2)
  bool with_v1 = true;
  bool with_v2 = true;
};

inline const std::vector<std::string>& dblp_professor_names() {
  static const std::vector<std::string> names = {
      "Sam Madden",      "Dan Suciu",     "Magda Balazinska", "Bill Howe",     "Jennifer Widom",
      "Joseph Hellerstein", "Michael Stonebraker", "Hector Garcia-Molina", "Jeffrey Naughton", "Raghu Ramakrishnan"};
  return names;
}

inline std::string dblp_query_students_of(const std::string& name_fragment) {
  return "Q(s) :- Student(s,y), Advisor(s,a), Author(a,n), n contains \"" + name_fragment + "\"";
}

inline ProjectText gen_dblp(const DblpConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  auto uniform = [&](std::uint64_t lo, std::uint64_t hi) { return lo + rng() % (hi - lo + 1); };
  const std::size_t profs = cfg.professors ? cfg.professors : std::max<std::size_t>(3, cfg.students / 2);
  const std::size_t k = std::min(cfg.advisors_per_student, profs);
  const auto& names = dblp_professor_names();

  ProjectText p;
  p.schema =
      "# synthetic DBLP analogue\n"
      "relation Author(aid:int, name:string) key(aid) deterministic\n"
      "relation Wrote(aid:int, pid:int) deterministic\n"
      "relation Pub(pid:int, title:string, year:int) key(pid) deterministic\n"
      "relation FirstPub(aid:int, year:int) key(aid) deterministic\n"
      "relation Coauthored(aid1:int, aid2:int, n:int) key(aid1, aid2) deterministic\n"
      "relation Student(aid:int, year:int) probabilistic\n"
      "relation Advisor(aid1:int, aid2:int) probabilistic\n";
  if (cfg.with_v1) p.views += "VIEW V1(aid1, aid2)[n / 2] :- Advisor(aid1, aid2), Student(aid1, year), Coauthored(aid1, aid2, n)\n";
  if (cfg.with_v2) p.views += "VIEW V2(aid1, aid2, aid3)[0] :- Advisor(aid1, aid2), Advisor(aid1, aid3), aid2 != aid3\n";

  std::ostringstream author, wrote, pub, first, coauth, student, advisor;
  for (std::size_t i = 0; i < profs; ++i) {
    std::string name = i < names.size() ? names[i] : "Professor " + std::to_string(i + 1);
    author << i + 1 << '\t' << name << "\tinf\n";
  }
  for (std::size_t s = 0; s < cfg.students; ++s) author << profs + s + 1 << "\tStudent " << s + 1 << "\tinf\n";

  std::size_t pid = 0;
  for (std::size_t s = 0; s < cfg.students; ++s) {
    const std::size_t aid = profs + s + 1;
    const int y_first = static_cast<int>(uniform(1995, 2010));
    first << aid << '\t' << y_first << "\tinf\n";
    for (std::size_t y = 0; y < cfg.years_per_student; ++y) {
      int year = y_first - 1 + static_cast<int>(y);
      double w = std::exp(1 - .15 * (year - y_first));
      student << aid << '\t' << year << '\t' << format_weight(w) << '\n';
    }
    // k distinct advisor candidates; the first student always has professor 1
    std::set<std::size_t> chosen;
    if (s == 0) chosen.insert(1);
    while (chosen.size() < k) chosen.insert(uniform(1, profs));
    for (std::size_t prof : chosen) {
      const auto n = static_cast<int>(uniform(1, 5));
      for (int j = 0; j < n; ++j) {
        ++pid;
        pub << pid << "\tPaper " << pid << '\t' << y_first + j % 4 << "\tinf\n";
        wrote << aid << '\t' << pid << "\tinf\n" << prof << '\t' << pid << "\tinf\n";
      }
      coauth << aid << '\t' << prof << '\t' << n << "\tinf\n";
      advisor << aid << '\t' << prof << '\t' << format_weight(std::exp(.25 * n)) << '\n';
    }
  }
  p.data["Author"] = author.str();
  p.data["Wrote"] = wrote.str();
  p.data["Pub"] = pub.str();
  p.data["FirstPub"] = first.str();
  p.data["Coauthored"] = coauth.str();
  p.data["Student"] = student.str();
  p.data["Advisor"] = advisor.str();
  return p;
}

}  // namespace mvdb
