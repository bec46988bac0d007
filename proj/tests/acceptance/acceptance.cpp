// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "generators.hpp"
#include "riskscope/riskscope.hpp"
#include "run.hpp"

using namespace riskscope;
namespace fs = std::filesystem;

namespace {

constexpr double kTableTol = 1e-12;
constexpr double kSeparationFloor = 1e-3;
constexpr double kSeSpan = 3.0;
constexpr std::size_t kMcDraws = 1'000'000;
constexpr std::uint64_t kMcSeed = 20140915;

// Collects mismatch descriptions; a criterion passes when none were recorded.
struct Check {
  std::vector<std::string> problems;
  void expect(bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream s;
    s << what << ": got " << format_number(got) << " want " << format_number(want);
    expect(std::abs(got - want) <= tol, s.str());
  }
};

struct Criterion {
  std::string id;
  std::string title;
  double budget_s;
  std::function<void(Check&)> body;
};

const MeasureSpec kVar = MeasureSpec::var(0.95);
const MeasureSpec kEs = MeasureSpec::es(0.95);
const MeasureSpec kMl = MeasureSpec::ml();

void loans(Check& c) {
  const auto ex = loan_counterexample();
  const auto sum = sum_distribution(ex.pair);
  c.expect(sum.atoms.size() == 3, "pair has three outcomes");
  if (sum.atoms.size() == 3) {
    c.expect(sum.atoms[0].p == 0.9216, "P(0) = 0.9216");
    c.expect(sum.atoms[1].p == 0.0768, "P(1M) = 0.0768");
    c.expect(sum.atoms[2].p == 0.0016, "P(2M) = 0.0016");
  }
  c.expect(var(ex.big_loan, 0.95) == 0.0, "VaR95 of the $2M loan is 0");
  c.expect(var(marginal1(ex.pair), 0.95) == 0.0, "VaR95 of the first $1M loan is 0");
  c.expect(var(marginal2(ex.pair), 0.95) == 0.0, "VaR95 of the second $1M loan is 0");
  c.expect(var(sum, 0.95) == 1e6, "VaR95 of the pair is 1,000,000");
  c.expect(check_subadditivity(kVar, ex.pair).verdict == Verdict::violated, "VaR95 subadditivity violated");
}

void table(Check& c) {
  struct Row {
    const char* id;
    MeasureSpec spec;
    std::vector<double> want;
  };
  const std::vector<Row> rows = {
      {"fig2", kEs, {2.5, 20.0 / 3, 20.0 / 3}},  {"fig2", kMl, {5, 20, 10}},
      {"fig3", kEs, {10, 10, 10}},               {"fig3", kMl, {16, 15, 30}},
      {"fig3", kVar, {4, 0, 0}},                 {"fig4", kVar, {-5, 0, 0}},
      {"fig4", kEs, {-5.0 / 3, 10.0 / 3, 2.5}},  {"fig4", kMl, {5, 5, 5}},
      {"fig5", kVar, {0, 0, 0}},                 {"fig5", kEs, {10, 10, 10}},
      {"fig5", kMl, {20, 15, 30}},               {"fig6", kVar, {0, 0, 0}},
      {"fig6", kMl, {5, 5, 5}},                  {"fig6", kEs, {5.0 / 3, 2.5, 10.0 / 3}},
      {"fig7", kEs, {5, 5, 5}},                  {"fig7", kMl, {15, 15, 15}},
      {"fig7", kVar, {-5, -15, 0}},
  };
  for (const auto& r : rows) {
    const auto f = scenarios::load(r.id);
    c.expect(f.members.size() == r.want.size(), std::string(r.id) + " member count");
    for (std::size_t i = 0; i < std::min(f.members.size(), r.want.size()); ++i)
      c.near(evaluate(f.members[i].dist, r.spec), r.want[i], kTableTol,
             std::string(r.id) + " " + to_string(r.spec) + " member " + std::to_string(i + 1));
  }
  const auto f8 = scenarios::load("fig8");
  for (std::size_t i = 0; i < f8.members.size(); ++i) {
    const auto& d = f8.members[i].dist;
    c.near(evaluate(d, kVar), 0, kTableTol, "fig8 var95 member " + std::to_string(i + 1));
    c.near(evaluate(d, kEs), 5, kTableTol, "fig8 es95 member " + std::to_string(i + 1));
    c.near(evaluate(d, kMl), 10, kTableTol, "fig8 ml member " + std::to_string(i + 1));
  }
}

std::vector<Distribution> members_of(const std::string& id) {
  std::vector<Distribution> out;
  for (const auto& m : scenarios::load(id).members) out.push_back(m.dist);
  return out;
}

void claims(Check& c) {
  const auto fig2 = members_of("fig2");
  const auto es_only = distinguish(fig2, {kEs});
  c.expect(!es_only.separable, "fig2 {es95} does not separate");
  const bool pair_23 = es_only.unseparated.size() == 1 && es_only.unseparated[0] == std::pair<std::size_t, std::size_t>{1, 2};
  c.expect(pair_23, "fig2 {es95} leaves exactly (X2, X3) together");
  c.expect(distinguish(fig2, {kMl}).separable, "fig2 {ml} separates");
  c.expect(!distinguish(members_of("fig5"), {kVar, kEs}).separable, "fig5 {var95, es95} indistinguishable");
  c.expect(distinguish(members_of("fig6"), {kEs}).separable, "fig6 {es95} separates");
  c.expect(distinguish(members_of("fig7"), {kVar}).separable, "fig7 {var95} separates");
}

void synthesis(Check& c) {
  const ConstraintSet cs{0.95, {{kVar, 0}, {kEs, 5}, {kMl, 10}}, {}};
  const auto fam = synthesize_family(cs, 4);
  const auto v = verify_family(fam);
  c.expect(fam.members.size() >= 4, "family has at least four members");
  c.expect(v.passes, "family verifies");
  c.expect(v.min_l1 >= kSeparationFloor, "pairwise L1 >= 1e-3");
  for (std::size_t n : {2u, 4u, 8u}) {
    const auto fit = solve_template(TemplateFamily::triangle_train(n), cs);
    const auto* t = std::get_if<TailSpec>(&fit);
    c.expect(t != nullptr, "triangle_train(" + std::to_string(n) + ") is feasible");
    if (!t) continue;
    for (const auto& [spec, want] : std::vector<std::pair<MeasureSpec, double>>{{kVar, 0}, {kEs, 5}, {kMl, 10}})
      c.near(evaluate(*t, spec), want, kTableTol, "triangle_train(" + std::to_string(n) + ") " + to_string(spec));
  }
}

void five_measure(Check& c) {
  // uniform [0,10] with tail mass 0.05: VaR99 = 10 - 10 * 0.01 / 0.05,
  // ES99 = midpoint of [8, 10], ES95 = midpoint of [0, 10].
  const ConstraintSet cs{0.95,
                         {{kVar, 0},
                          {MeasureSpec::var(0.99), 10.0 - 10.0 * 0.01 / 0.05},
                          {kEs, 5},
                          {MeasureSpec::es(0.99), 9},
                          {kMl, 10}},
                         {}};
  const auto fam = synthesize_family(cs, 2);
  c.expect(fam.members.size() == 2, "two members");
  c.expect(verify_family(fam).passes, "family verifies");
  c.expect(!distinguish({fam.members.begin(), fam.members.end()}, five_measure_menu()).separable, "five-measure menu cannot separate");
}

void monte_carlo(Check& c) {
  std::uint64_t stream = 0;
  for (const auto& id : scenarios::registered_ids()) {
    for (const auto& m : scenarios::load(id).members) {
      const auto* t = std::get_if<TailSpec>(&m.dist);
      if (!t) continue;
      const std::vector<MeasureSpec> specs{MeasureSpec::var(t->alpha), MeasureSpec::es(t->alpha)};
      const auto mc = mc_estimate_vector(*t, specs, kMcDraws, kMcSeed + stream++);
      for (std::size_t i = 0; i < specs.size(); ++i) {
        const double exact = evaluate(*t, specs[i]);
        std::ostringstream s;
        s << id << " " << m.label << " " << to_string(specs[i]) << ": exact " << format_number(exact) << " mc "
          << format_number(mc[i].value) << " se " << format_number(mc[i].standard_error);
        c.expect(std::abs(mc[i].value - exact) <= kSeSpan * mc[i].standard_error, s.str());
      }
    }
  }
}

void axioms(Check& c) {
  gen::Gen g(7001);
  std::size_t violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto d = gen::random_distribution(g);
    const double level = std::holds_alternative<TailSpec>(d) ? std::get<TailSpec>(d).alpha : 0.95;
    const Translation tr{g.uniform(-100, 100)};
    const Homogeneity hg{g.uniform(0, 10)};
    for (const auto& s : {MeasureSpec::var(level), MeasureSpec::es(level), kMl}) {
      c.expect(check_axiom(s, d, tr).verdict == Verdict::holds_on_cases,
               "translation " + to_string(s) + " case " + std::to_string(i));
      c.expect(check_axiom(s, d, hg).verdict == Verdict::holds_on_cases,
               "homogeneity " + to_string(s) + " case " + std::to_string(i));
    }
    const auto joint = gen::random_joint(g);
    for (double l : {0.9, 0.95, 0.99})
      c.expect(check_subadditivity(MeasureSpec::es(l), joint).verdict == Verdict::holds_on_cases,
               "es subadditivity case " + std::to_string(i));
    const auto v = check_subadditivity(MeasureSpec::var(0.9), joint);
    if (v.verdict == Verdict::violated) {
      ++violations;
      const bool replayable = v.witness && v.witness->joint && replay(v) == std::pair(v.lhs, v.rhs);
      c.expect(replayable, "var witness replays, case " + std::to_string(i));
    }
  }
  std::cout << "  var90 subadditivity violations found: " << violations << " (all replayed)\n";
}

void round_trip(Check& c, const std::string& cli, const fs::path& workdir) {
  gen::Gen g(8001);
  for (int i = 0; i < 100; ++i) {
    const auto d = gen::random_distribution(g);
    const auto text = json_io::write_distribution(d);
    const auto back = json_io::read_distribution(text);
    c.expect(back == d && json_io::write_distribution(back) == text, "round trip case " + std::to_string(i));
  }
  const TailSpec rising{0.95, shapes::rising(-15, 15, 1.0 - 0.95), Orientation::loss};
  fs::create_directories(workdir);
  const auto input = (workdir / "acceptance_rising.json").string();
  json_io::write_file(input, json_io::write_distribution(rising));
  std::string outputs[2];
  for (int k = 0; k < 2; ++k) {
    const auto out = (workdir / ("acceptance_plot_" + std::to_string(k) + ".svg")).string();
    const auto r = run::shell(run::quote(cli) + " plot --dist " + run::quote(input) + " --out " + run::quote(out));
    c.expect(r.code == 0, "plot run " + std::to_string(k + 1) + " exits 0");
    outputs[k] = run::slurp(out);
  }
  c.expect(!outputs[0].empty() && outputs[0] == outputs[1], "plot output byte-identical across runs");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"riskscope acceptance suite"};
  std::string cli;
  std::string workdir = fs::temp_directory_path().string();
  app.add_option("--cli", cli, "Path to the riskscope executable")->required();
  app.add_option("--workdir", workdir, "Scratch directory");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {"AC1", "loan counterexample", 1.0, loans},
      {"AC2", "figure value table", 1.0, table},
      {"AC3", "distinguisher claims", 1.0, claims},
      {"AC4", "ambiguity synthesis", 5.0, synthesis},
      {"AC5", "five-measure indistinguishability", 10.0, five_measure},
      {"AC6", "Monte Carlo oracle suite", 60.0, monte_carlo},
      {"AC7", "axiom property suite", 30.0, axioms},
      {"AC8", "round trip and determinism", 30.0, [&](Check& c) { round_trip(c, cli, workdir); }},
  };

  int failed = 0;
  for (const auto& cr : criteria) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.body(c);
    } catch (const std::exception& e) {
      c.problems.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > cr.budget_s) {
      std::ostringstream s;
      s << "took " << secs << " s, budget " << cr.budget_s << " s";
      c.problems.push_back(s.str());
    }
    const bool ok = c.problems.empty();
    failed += ok ? 0 : 1;
    std::printf("%s %s %s (%.3f s, budget %.0f s)\n", ok ? "PASS" : "FAIL", cr.id.c_str(), cr.title.c_str(), secs,
                cr.budget_s);
    for (const auto& p : c.problems) std::printf("  %s\n", p.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
