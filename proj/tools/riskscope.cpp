// riskscope: exact risk measures, ambiguity families and axiom checks over
// JSON distribution files.
//
// Exit codes: 0 success, 1 domain failure (infeasible, undefined, failed
// verification), 2 usage or input error.

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "riskscope/riskscope.hpp"

namespace {

using namespace riskscope;
using json_io::json;

constexpr int kOk = 0;
constexpr int kDomain = 1;
constexpr int kUsage = 2;

int exit_code_for(const Error& e) {
  if (dynamic_cast<const FormatError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
      dynamic_cast<const ArgumentError*>(&e))
    return kUsage;
  return kDomain;
}

void emit(const json& j, bool pretty) { std::cout << json_io::dump(j, pretty ? 2 : -1) << "\n"; }

void fail(const std::string& msg) { std::cerr << "riskscope: " << msg << "\n"; }

std::uint64_t default_seed() {
  const char* env = std::getenv("RISKSCOPE_SEED");
  if (!env || !*env) return 20140915;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (errno != 0 || *end != '\0' || env[0] == '-') throw ArgumentError("RISKSCOPE_SEED must be a non-negative integer");
  return v;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

// ---------------------------------------------------------------------------

struct ComputeArgs {
  std::vector<std::string> dists;
  std::string measures = "var95,es95,ml";
  std::optional<std::size_t> mc;
  std::optional<std::uint64_t> seed;
  bool pretty = false;
};

void print_report_table(const RiskReport& r) {
  std::cout << r.dist_id << "\n";
  for (const auto& e : r.entries) {
    std::cout << "  " << pad(to_string(e.spec), 12) << pad(format_number(e.value), 26)
              << (e.method == EvaluationMethod::closed_form ? "closed_form" : "monte_carlo");
    if (e.standard_error) std::cout << "  se " << format_number(*e.standard_error);
    std::cout << "\n";
  }
}

int run_compute(const ComputeArgs& a) {
  const auto specs = parse_measure_list(a.measures);
  std::optional<McOptions> mc;
  if (a.mc) mc = McOptions{*a.mc, a.seed ? *a.seed : default_seed()};
  int code = kOk;
  for (const auto& path : a.dists) {
    try {
      const RiskReport r = make_report(path, json_io::load_distribution(path), specs, mc);
      if (a.pretty)
        print_report_table(r);
      else
        emit(json_io::to_json(r), false);
    } catch (const Error& e) {
      fail(path + ": " + e.what());
      code = std::max(code, exit_code_for(e));
    }
  }
  return code;
}

// ---------------------------------------------------------------------------

struct SynthesizeArgs {
  std::string constraints;
  std::size_t count = 4;
  std::string families;
  std::string train_counts;
  std::optional<double> min_separation;
  std::optional<std::size_t> max_attempts;
  std::optional<std::uint64_t> seed;
  bool pretty = false;
};

int run_synthesize(const SynthesizeArgs& a) {
  const ConstraintSet cs = json_io::constraints_from_json(json_io::parse(json_io::read_file(a.constraints)));
  SynthesisOptions opt;
  if (!a.families.empty()) {
    opt.templates.clear();
    for (const auto& name : split_list(a.families)) opt.templates.push_back(parse_template_kind(name));
  }
  if (!a.train_counts.empty()) {
    opt.train_counts.clear();
    for (const auto& n : split_list(a.train_counts)) {
      char* end = nullptr;
      const unsigned long v = std::strtoul(n.c_str(), &end, 10);
      if (*end != '\0' || v == 0) throw ArgumentError("train counts must be positive integers");
      opt.train_counts.push_back(v);
    }
  }
  if (a.min_separation) opt.min_separation = *a.min_separation;
  if (a.max_attempts) opt.max_attempts = *a.max_attempts;
  opt.seed = a.seed ? *a.seed : default_seed();

  const AmbiguityFamily fam = synthesize_family(cs, a.count, opt);
  const FamilyVerification v = verify_family(fam);
  json out;
  out["family"] = json_io::to_json(fam);
  out["verification"] = json_io::to_json(v);
  emit(out, a.pretty);
  if (!v.passes) {
    for (const auto& f : v.failures) fail(f);
    return kDomain;
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct DistinguishArgs {
  std::vector<std::string> dists;
  std::string menu = "var95,var99,es95,es99,ml";
  bool pretty = false;
};

int run_distinguish(const DistinguishArgs& a) {
  if (a.dists.size() < 2) throw ArgumentError("distinguish needs at least two --dists files");
  std::vector<Distribution> members;
  for (const auto& path : a.dists) {
    try {
      members.push_back(json_io::load_distribution(path));
    } catch (Error& e) {
      e.add_context(path);
      throw;
    }
  }
  const DistinguishResult r = distinguish(members, parse_measure_list(a.menu));
  json out;
  out["members"] = a.dists;
  const json body = json_io::to_json(r);
  for (const auto& el : body.items()) out[el.key()] = el.value();
  emit(out, a.pretty);
  return kOk;
}

// ---------------------------------------------------------------------------

struct CoherenceArgs {
  std::string joint;
  std::string dist;
  std::string axiom;
  std::optional<double> param;
  std::string measures = "var95,es95";
  bool pretty = false;
};

int run_coherence(const CoherenceArgs& a) {
  const auto specs = parse_measure_list(a.measures);
  json results = json::array();
  if (!a.dist.empty()) {
    if (!a.joint.empty()) throw ArgumentError("--dist and --joint are mutually exclusive");
    const Distribution d = json_io::load_distribution(a.dist);
    AxiomParams params;
    if (a.axiom == "translation") {
      if (!a.param) throw ArgumentError("translation needs --param A");
      params = Translation{*a.param};
    } else if (a.axiom == "homogeneity") {
      if (!a.param) throw ArgumentError("homogeneity needs --param K");
      params = Homogeneity{*a.param};
    } else if (a.axiom == "monotonicity") {
      params = Monotonicity{};
    } else {
      throw ArgumentError("--axiom must be translation, homogeneity or monotonicity");
    }
    for (const auto& s : specs) results.push_back(json_io::to_json(check_axiom(s, d, params)));
  } else {
    if (!a.axiom.empty() && a.axiom != "subadditivity")
      throw ArgumentError("--axiom " + a.axiom + " needs --dist");
    const JointDiscrete joint = a.joint.empty() ? loan_counterexample().pair
                                                : json_io::joint_from_json(json_io::parse(json_io::read_file(a.joint)));
    for (const auto& s : specs) results.push_back(json_io::to_json(check_subadditivity(s, joint)));
  }
  emit(results, a.pretty);
  return kOk;
}

// ---------------------------------------------------------------------------

struct PaperArgs {
  std::string figure;
  bool all = false;
  bool pretty = false;
};

void print_fixture_table(const scenarios::FixtureReport& r) {
  std::cout << r.id << ": " << r.narrative << "\n";
  for (const auto& v : r.values)
    std::cout << "  " << pad(r.labels[v.member], 44) << pad(v.what, 10) << pad(format_number(v.expected), 26)
              << pad(format_number(v.actual), 26) << (v.pass ? "ok" : "MISMATCH") << "\n";
  for (const auto& c : r.claims) {
    std::string menu;
    for (const auto& s : c.claim.menu) menu += (menu.empty() ? "" : ",") + to_string(s);
    std::cout << "  distinguish {" << menu << "}: " << (c.result.separable ? "separates" : "indistinguishable")
              << (c.pass ? "  ok" : "  MISMATCH") << "\n";
  }
  for (const auto& a : r.axioms)
    std::cout << "  subadditivity " << to_string(a.result.measure) << ": " << to_string(a.result.verdict)
              << (a.pass ? "  ok" : "  MISMATCH") << "\n";
}

int run_paper(const PaperArgs& a) {
  if (a.all == !a.figure.empty()) throw ArgumentError("give exactly one of --figure or --all");
  if (a.all) {
    const auto rep = scenarios::run_all();
    if (a.pretty)
      for (const auto& f : rep.fixtures) print_fixture_table(f);
    else
      emit(scenarios::to_json(rep), false);
    return rep.passes ? kOk : kDomain;
  }
  std::string id = a.figure;
  if (!id.empty() && id.find_first_not_of("0123456789") == std::string::npos) id = "fig" + id;
  const auto fixture = scenarios::load(id);
  const auto rep = scenarios::run_fixture(fixture);
  if (a.pretty) {
    print_fixture_table(rep);
  } else {
    json out;
    out["fixture"] = scenarios::to_json(fixture);
    out["report"] = scenarios::to_json(rep);
    emit(out, false);
  }
  return rep.passes ? kOk : kDomain;
}

// ---------------------------------------------------------------------------

struct PlotArgs {
  std::string dist;
  std::string out;
  std::string format = "svg";
  std::optional<double> level;
};

int run_plot(const PlotArgs& a) {
  const Distribution d = json_io::load_distribution(a.dist);
  const std::string text = a.format == "csv" ? plot::csv(d) : plot::svg(d, a.level);
  json_io::write_file(a.out, text);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact VaR / ES / ML, ambiguity families and coherence checks"};
  app.require_subcommand(1);

  ComputeArgs compute;
  auto* c = app.add_subcommand("compute", "Evaluate measures on distribution files");
  c->add_option("--dist", compute.dists, "Distribution JSON files")->required();
  c->add_option("--measures", compute.measures, "Comma-separated specs, e.g. var95,es99,ml");
  c->add_option("--mc", compute.mc, "Add Monte Carlo oracle entries with N draws")->check(CLI::Range(1000ul, 1ul << 32));
  c->add_option("--seed", compute.seed, "Seed (default $RISKSCOPE_SEED)");
  c->add_flag("--pretty", compute.pretty, "Human-readable table");

  SynthesizeArgs synth;
  auto* s = app.add_subcommand("synthesize", "Build a family of tails sharing a measure vector");
  s->add_option("--constraints", synth.constraints, "Constraint JSON file")->required();
  s->add_option("--count", synth.count, "Family size K")->check(CLI::PositiveNumber);
  s->add_option("--families", synth.families, "Templates to use (comma-separated)");
  s->add_option("--train-counts", synth.train_counts, "Triangle counts for triangle trains");
  s->add_option("--min-separation", synth.min_separation, "Minimum pairwise L1 distance")->check(CLI::PositiveNumber);
  s->add_option("--max-attempts", synth.max_attempts, "Perturbation attempts");
  s->add_option("--seed", synth.seed, "Seed (default $RISKSCOPE_SEED)");
  s->add_flag("--pretty", synth.pretty, "Indented JSON");

  DistinguishArgs dist;
  auto* d = app.add_subcommand("distinguish", "Find a minimal separating measure set");
  d->add_option("--dists", dist.dists, "Distribution JSON files")->required();
  d->add_option("--menu", dist.menu, "Candidate measures (comma-separated)");
  d->add_flag("--pretty", dist.pretty, "Indented JSON");

  CoherenceArgs coh;
  auto* h = app.add_subcommand("coherence", "Check risk-measure axioms (default: loan portfolio)");
  h->add_option("--joint", coh.joint, "Joint discrete JSON for subadditivity");
  h->add_option("--dist", coh.dist, "Distribution JSON for single-position axioms");
  h->add_option("--axiom", coh.axiom, "translation | homogeneity | monotonicity | subadditivity");
  h->add_option("--param", coh.param, "Translation amount or homogeneity factor");
  h->add_option("--measures", coh.measures, "Measures to check");
  h->add_flag("--pretty", coh.pretty, "Indented JSON");

  PaperArgs paper;
  auto* p = app.add_subcommand("paper", "Reproduce a worked example family");
  p->add_option("--figure", paper.figure, "2..9 or loans");
  p->add_flag("--all", paper.all, "Run every fixture");
  p->add_flag("--pretty", paper.pretty, "Comparison table instead of JSON");

  PlotArgs plt;
  auto* g = app.add_subcommand("plot", "Write a tail plot");
  g->add_option("--dist", plt.dist, "Distribution JSON file")->required();
  g->add_option("--out", plt.out, "Output path")->required();
  g->add_option("--format", plt.format, "svg or csv")->check(CLI::IsMember({"svg", "csv"}));
  g->add_option("--level", plt.level, "Level for the VaR/ES ticks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (c->parsed()) return run_compute(compute);
    if (s->parsed()) return run_synthesize(synth);
    if (d->parsed()) return run_distinguish(dist);
    if (h->parsed()) return run_coherence(coh);
    if (p->parsed()) return run_paper(paper);
    if (g->parsed()) return run_plot(plt);
  } catch (const Error& e) {
    fail(e.what());
    return exit_code_for(e);
  }
  return kUsage;
}
