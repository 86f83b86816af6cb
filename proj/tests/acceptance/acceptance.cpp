// Acceptance run: executes the default suite fixture family by family and
// prints one PASS/FAIL line per criterion. Besides every check passing, each
// criterion requires its parameter grid to be fully present in the fixture.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "birthsub/error.hpp"
#include "birthsub/verify.hpp"

using namespace birthsub;

namespace {

double param(const ParamList& params, const std::string& name) {
  for (const auto& [k, v] : params)
    if (k == name) return v;
  return std::nan("");
}

struct Criterion {
  int number;
  std::string title;
  std::vector<std::string> families;
  std::function<bool(const SuiteResult&, std::string&)> coverage;
};

std::size_t count_id(const SuiteResult& r, const std::string& id) {
  std::size_t n = 0;
  for (const auto& i : r.identities) n += i.id == id;
  return n;
}

bool need(std::string& why, bool ok, const std::string& what) {
  if (!ok && why.empty()) why = what;
  return ok;
}

// Every (k, t) with k <= 5 and t in {0.5, 1, 2} must appear for the law.
bool grid_covered(const SuiteResult& r, const std::string& id) {
  std::set<std::pair<int, double>> seen;
  for (const auto& i : r.identities)
    if (i.id == id) seen.emplace(static_cast<int>(param(i.params, "k")), param(i.params, "t"));
  for (int k = 1; k <= 5; ++k)
    for (double t : {0.5, 1.0, 2.0})
      if (!seen.count({k, t})) return false;
  return true;
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list{
      {1, "special-function identities", {"mitta-int", "mitlap", "ackard", "mmm"},
       [](const SuiteResult& r, std::string& why) {
         std::set<std::pair<double, double>> grid;
         for (const auto& i : r.identities)
           if (i.id == "mitta-int") grid.emplace(param(i.params, "nu"), param(i.params, "x"));
         bool ok = need(why, grid.size() >= 64, "mitta-int grid smaller than 8 x 8");
         for (const char* id : {"mitlap", "ackard", "mmm-wright", "mmm-kernel"})
           ok = need(why, count_id(r, id) > 0, std::string("no ") + id + " checks") && ok;
         return ok;
       }},
      {2, "governing equations", {"fra", "eq-sec", "olidata", "cauchy-ode"},
       [](const SuiteResult& r, std::string& why) {
         bool ok = true;
         for (const char* id : {"fra", "eq-sec", "cauchy-ode"})
           ok = need(why, count_id(r, id) > 0, std::string("no ") + id + " checks") && ok;
         std::set<int> depths;
         for (const auto& i : r.identities)
           if (i.id == "olidata") depths.insert(static_cast<int>(param(i.params, "n")));
         return need(why, depths == std::set<int>{1, 2, 3, 4}, "olidata does not cover n = 1..4") && ok;
       }},
      {3, "subordination-integral consistency", {"subordination"},
       [](const SuiteResult& r, std::string& why) {
         bool ok = true;
         for (const char* law : {"fp", "sojourn", "bridge", "stable"})
           ok = need(why, grid_covered(r, std::string("subordination-") + law),
                     std::string("subordination-") + law + " misses part of k <= 5, t in {0.5, 1, 2}") &&
                ok;
         return ok;
       }},
      {4, "index-product identities", {"gen-mitta", "triple-index"},
       [](const SuiteResult& r, std::string& why) {
         std::set<std::pair<double, double>> grid;
         std::set<double> times;
         for (const auto& i : r.identities)
           if (i.id == "gen-mitta") {
             grid.emplace(param(i.params, "nu"), param(i.params, "alpha"));
             times.insert(param(i.params, "t"));
           }
         bool ok = need(why, grid.size() >= 16, "gen-mitta grid smaller than 4 x 4");
         ok = need(why, times == std::set<double>{0.5, 1.0, 2.0}, "gen-mitta times differ from {0.5, 1, 2}") && ok;
         ok = need(why, count_id(r, "gen-mitta2") == count_id(r, "gen-mitta"), "commuted form not paired") && ok;
         return need(why, count_id(r, "triple-index") > 0, "no triple-index check") && ok;
       }},
      {5, "equality in distribution (Monte Carlo)", {"monte-carlo", "half-fp-cauchy"},
       [](const SuiteResult& r, std::string& why) {
         const std::vector<std::pair<std::string, double>> wanted{
             {"mc-nu-of-t2alpha", 0.01}, {"mc-frac-stable-lamperti", 0.015}, {"mc-stable-of-t2nu-lamperti", 0.015},
             {"mc-sojourn", 0.01},       {"mc-bridge", 0.01},                {"mc-fp", 0.01}};
         bool ok = true;
         for (const auto& [id, tol] : wanted) {
           bool found = false;
           for (const auto& g : r.gof)
             if (g.id == id) found = g.n_paths >= 100000 && g.tv_tolerance <= tol;
           ok = need(why, found, id + " missing, under 1e5 paths or with a looser TV bound") && ok;
         }
         return need(why, count_id(r, "half-fp-cauchy") > 0, "no half-fp-cauchy checks") && ok;
       }},
      {6, "non-commutativity", {"noncommutativity"},
       [](const SuiteResult& r, std::string& why) {
         bool ok = false;
         for (const auto& i : r.identities)
           if (i.id == "noncommutativity" && i.separation && param(i.params, "nu") == 0.5 &&
               param(i.params, "factor") >= 10.0)
             ok = true;
         return need(why, ok, "no nu = 1/2 separation check with factor >= 10");
       }},
      {7, "closed-form spot values", {"spot"},
       [](const SuiteResult& r, std::string& why) {
         bool ok = true;
         for (const char* id : {"spot-fp", "spot-iterated-limit", "spot-linear-mean", "spot-fractional-mean",
                                "bridge-mean", "bridge-variance"})
           ok = need(why, count_id(r, id) > 0, std::string("no ") + id + " checks") && ok;
         for (const auto& i : r.identities)
           if (i.id == "spot-fp" && param(i.params, "lambda") == 1.0 && param(i.params, "t") == 1.0)
             ok = need(why, std::abs(i.lhs - 0.243117) < 5e-7, "p_1(1) differs from 0.243117") && ok;
         return ok;
       }},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : BIRTHSUB_DEFAULT_FIXTURE;
  std::ifstream in(path);
  if (!in) {
    std::fprintf(stderr, "cannot read fixture %s\n", path.c_str());
    return 2;
  }
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};

  bool all = true;
  try {
    const SuiteConfig config = SuiteConfig::parse(text);
    for (const auto& c : criteria()) {
      const auto start = std::chrono::steady_clock::now();
      const SuiteResult r = run_suite(config, {c.families, 0});
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

      std::string why;
      const bool covered = c.coverage(r, why);
      double worst = 0.0;
      // Below 1 means passing; separation checks contribute tol/diff.
      for (const auto& i : r.identities) {
        if (!i.separation && i.tolerance > 0.0) worst = std::max(worst, i.abs_diff / i.tolerance);
        if (i.separation && i.abs_diff > 0.0) worst = std::max(worst, i.tolerance / i.abs_diff);
      }
      for (const auto& g : r.gof) worst = std::max(worst, g.tv / g.tv_tolerance);
      const bool pass = covered && r.all_pass();
      all = all && pass;

      std::printf("criterion %d (%s): %s  [%zu checks, worst ratio to tolerance %.3g, %.1f s]\n", c.number, c.title.c_str(),
                  pass ? "PASS" : "FAIL", r.identities.size() + r.gof.size(), worst, secs);
      if (!covered) std::printf("    coverage: %s\n", why.c_str());
      for (const auto& id : r.failing_ids()) std::printf("    failed: %s\n", id.c_str());
    }
  } catch (const Error& e) {
    std::printf("error: %s\n", e.what());
    return 2;
  }
  std::fflush(stdout);
  return all ? 0 : 1;
}
