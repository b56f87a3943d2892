// Copyright 2026 The gnmverify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "gnm/analysis.hpp"
#include "gnm/config.hpp"
#include "gnm/errors.hpp"
#include "gnm/group_io.hpp"
#include "gnm/protocol.hpp"
#include "gnm/qsim.hpp"

namespace gnm::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kBoundSlack = 1e-9;

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string hex(std::uint64_t x) {
  std::ostringstream s;
  s << std::hex << x;
  return s.str();
}

json nullable(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }
json nullable(const std::optional<bool>& x) { return x ? json(*x) : json(nullptr); }
std::string cell(const std::optional<double>& x) { return x ? num(*x) : ""; }
std::string cell(const std::optional<bool>& x) { return x ? (*x ? "true" : "false") : ""; }
std::string cell(bool x) { return x ? "true" : "false"; }

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const {
    std::ostringstream s;
    auto line = [&s](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) s << ',';
        const bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
        if (quote) {
          s << '"';
          for (char c : cells[i]) s << (c == '"' ? "\"\"" : std::string(1, c));
          s << '"';
        } else {
          s << cells[i];
        }
      }
      s << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return s.str();
  }
};

struct Artifact {
  std::string file;
  std::string content;
};

/// Options shared by every subcommand.
struct Common {
  std::string out_dir;
  std::string format;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;

  bool json_format(const std::string& fallback) const { return (format.empty() ? fallback : format) == "json"; }
};

void add_common(CLI::App* sub, Common& c, bool with_config) {
  sub->add_option("--out", c.out_dir, "Directory for report files and manifest.json");
  sub->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--seed", c.seed, "Override the RNG seed");
  sub->add_option("--trials", c.trials, "Override the Monte Carlo trial count");
  if (with_config) sub->add_option("--config", c.config, "Run-config JSON file");
}

using Clock = std::chrono::steady_clock;

/// Writes artifacts to --out (plus a manifest) or prints them.
void emit(const Common& c, const std::string& command, const std::vector<std::string>& args,
          const std::vector<Artifact>& artifacts, json manifest_extra, Clock::time_point start, std::ostream& out) {
  if (c.out_dir.empty()) {
    for (std::size_t i = 0; i < artifacts.size(); ++i) {
      if (i) out << '\n';
      out << artifacts[i].content;
    }
    return;
  }
  const fs::path dir(c.out_dir);
  fs::create_directories(dir);
  json outputs = json::array();
  for (const auto& a : artifacts) {
    std::ofstream f(dir / a.file, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / a.file).string());
    f << a.content;
    outputs.push_back((dir / a.file).string());
  }
  json manifest = {{"tool", "gnm"},
                   {"version", GNM_VERSION},
                   {"command", command},
                   {"arguments", args},
                   {"outputs", outputs},
                   {"wall_clock_seconds", std::chrono::duration<double>(Clock::now() - start).count()}};
  for (auto& [k, v] : manifest_extra.items()) manifest[k] = v;
  std::ofstream(dir / "manifest.json", std::ios::binary) << manifest.dump(2) << '\n';
  for (const auto& o : outputs) out << "wrote " << o.get<std::string>() << '\n';
  out << "wrote " << (dir / "manifest.json").string() << '\n';
}

json run_manifest(const RunSpec& spec) {
  return {{"config_path", spec.config_path.string()},
          {"run", to_json(spec)},
          {"group_fingerprint", hex(spec.grp().fingerprint())},
          {"strategy", describe(spec.strategy, spec.grp())}};
}

RunSpec load_spec(const Common& c) {
  if (c.config.empty()) throw std::invalid_argument("--config is required");
  RunSpec spec = load_run_spec(c.config);
  if (c.seed) spec.protocol.seed = *c.seed;
  if (c.trials) spec.protocol.trials = *c.trials;
  spec.protocol.validate();
  return spec;
}

bool ideal(const ProtocolConfig& c) { return !c.noise || c.noise->ideal(); }

// ---------------------------------------------------------------------------
// group

int cmd_group(const std::string& source, const std::vector<std::string>& only, const Common& c,
              const std::vector<std::string>& args, Clock::time_point start, std::ostream& out) {
  GroupDefinition def = resolve_group(source, fs::current_path());
  if (!only.empty()) {
    std::map<std::string, std::vector<std::string>> kept;
    for (const auto& name : only) {
      auto it = def.subgroups.find(name);
      if (it == def.subgroups.end()) throw std::invalid_argument("group has no subgroup named '" + name + "'");
      kept.insert(*it);
    }
    def.subgroups = std::move(kept);
  }
  const json summary = group_summary_json(def);
  std::vector<Artifact> artifacts;
  if (c.json_format("json")) {
    artifacts.push_back({"group.json", summary.dump(2) + "\n"});
  } else {
    Table elems{{"index", "name", "order", "inverse"}, {}};
    for (const auto& e : summary.at("elements")) {
      elems.rows.push_back({std::to_string(e.at("index").get<std::size_t>()), e.at("name").get<std::string>(),
                            std::to_string(e.at("order").get<std::size_t>()), e.at("inverse").get<std::string>()});
    }
    Table subs{{"subgroup", "generators", "elements", "cosets"}, {}};
    auto join = [](const json& list, const char* sep) {
      std::string s;
      for (std::size_t i = 0; i < list.size(); ++i) s += (i ? sep : "") + list[i].get<std::string>();
      return s;
    };
    for (const auto& [name, sj] : summary.at("subgroups").items()) {
      std::string cosets;
      for (std::size_t i = 0; i < sj.at("cosets").size(); ++i) {
        cosets += (i ? "|" : "") + join(sj.at("cosets")[i], " ");
      }
      subs.rows.push_back({name, join(sj.at("generators"), " "), join(sj.at("elements"), " "), cosets});
    }
    artifacts.push_back({"group_elements.csv", elems.csv()});
    artifacts.push_back({"group_subgroups.csv", subs.csv()});
  }
  emit(c, "group", args, artifacts,
       {{"group_source", def.source}, {"group_fingerprint", summary.at("fingerprint")}}, start, out);
  return kOk;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const Common& c, bool exact_only, bool mc_only, bool records, const std::vector<std::string>& args,
                 Clock::time_point start, std::ostream& out, std::ostream& err) {
  const RunSpec spec = load_spec(c);
  const FiniteGroup& G = spec.grp();
  const Subgroup& S = spec.sub();
  const ProtocolConfig& cfg = spec.protocol;
  const bool g_in_s = S.contains(spec.g);
  const bool g_identity = spec.g == G.identity();

  std::optional<double> exact;
  std::string exact_note;
  if (!mc_only) {
    try {
      exact = exact_accept_probability(spec.strategy, spec.g, S, cfg);
    } catch (const TooLargeForExact& e) {
      if (exact_only) throw;
      exact_note = e.what();
      err << "warning: exact engine skipped (" << e.what() << "); using Monte Carlo only\n";
    }
  }
  std::optional<MonteCarloEstimate> mc;
  if (!exact_only) mc = monte_carlo(spec.strategy, spec.g, S, cfg, records);

  const double bound8 = soundness_bound(cfg.m);
  std::optional<double> chain;
  if (g_in_s && !g_identity) {
    try {
      chain = soundness_chain_bound(G.element_order(spec.g), S.size(), G.label_bits(), cfg.m);
    } catch (const DegenerateDenominator&) {
    }
  }
  const double bound = chain ? std::min(bound8, *chain) : bound8;

  std::optional<bool> sound_exact, sound_mc, complete_exact, complete_mc;
  if (ideal(cfg) && g_in_s) {
    if (exact) sound_exact = *exact <= bound + kBoundSlack;
    if (mc) sound_mc = mc->accept_rate <= bound + 4.0 * mc->std_error + kBoundSlack;
  }
  const bool honest = std::holds_alternative<HonestCoset>(spec.strategy);
  if (ideal(cfg) && !g_in_s && honest) {
    if (exact) complete_exact = std::abs(*exact - 0.5) <= 1e-12;
    if (mc) complete_mc = std::abs(mc->accept_rate - 0.5) <= 4.0 * std::sqrt(0.25 / static_cast<double>(mc->trials));
  }
  const bool violation = (sound_exact && !*sound_exact) || (sound_mc && !*sound_mc) ||
                         (complete_exact && !*complete_exact) || (complete_mc && !*complete_mc);

  std::vector<Artifact> artifacts;
  if (c.json_format("csv")) {
    json report;
    report["run"] = to_json(spec);
    report["g_in_subgroup"] = g_in_s;
    report["exact"] = exact ? json{{"accept_probability", *exact}} : json(nullptr);
    if (!exact_note.empty()) report["exact_skipped"] = exact_note;
    if (mc) {
      json m = {{"trials", mc->trials},
                {"accepted", mc->accepted},
                {"accept_rate", mc->accept_rate},
                {"std_error", mc->std_error},
                {"test_pass_rate", mc->test_pass_rate},
                {"rsi_accept_rate", mc->rsi_accept_rate},
                {"reserved_span_rate", mc->reserved_span_rate},
                {"prove_rate", mc->prove_rate}};
      if (records) {
        m["records"] = json::array();
        for (const auto& r : mc->records) m["records"].push_back(to_json(r, G));
      }
      report["monte_carlo"] = m;
    } else {
      report["monte_carlo"] = nullptr;
    }
    report["bounds"] = {{"soundness_8_over_m", bound8}, {"chain_bound", nullable(chain)}, {"bound", bound}};
    report["flags"] = {{"soundness_exact", nullable(sound_exact)},
                       {"soundness_monte_carlo", nullable(sound_mc)},
                       {"completeness_exact", nullable(complete_exact)},
                       {"completeness_monte_carlo", nullable(complete_mc)}};
    artifacts.push_back({"simulate.json", report.dump(2) + "\n"});
  } else {
    Table t{{"metric", "value"}, {}};
    t.rows.push_back({"g_in_subgroup", cell(g_in_s)});
    t.rows.push_back({"exact_accept_probability", cell(exact)});
    if (mc) {
      t.rows.push_back({"mc_trials", std::to_string(mc->trials)});
      t.rows.push_back({"mc_accepted", std::to_string(mc->accepted)});
      t.rows.push_back({"mc_accept_rate", num(mc->accept_rate)});
      t.rows.push_back({"mc_std_error", num(mc->std_error)});
      t.rows.push_back({"mc_test_pass_rate", num(mc->test_pass_rate)});
      t.rows.push_back({"mc_rsi_accept_rate", num(mc->rsi_accept_rate)});
      t.rows.push_back({"mc_reserved_span_rate", num(mc->reserved_span_rate)});
      t.rows.push_back({"mc_prove_rate", num(mc->prove_rate)});
    }
    t.rows.push_back({"soundness_8_over_m", num(bound8)});
    t.rows.push_back({"chain_bound", cell(chain)});
    t.rows.push_back({"bound", num(bound)});
    t.rows.push_back({"soundness_exact_ok", cell(sound_exact)});
    t.rows.push_back({"soundness_monte_carlo_ok", cell(sound_mc)});
    t.rows.push_back({"completeness_exact_ok", cell(complete_exact)});
    t.rows.push_back({"completeness_monte_carlo_ok", cell(complete_mc)});
    artifacts.push_back({"simulate.csv", t.csv()});
    if (records && mc) {
      Table r{{"trial", "reserved_index", "test_outcomes", "sampled_elements", "span_outcomes", "prove_outcome",
               "accepted"},
              {}};
      for (std::size_t i = 0; i < mc->records.size(); ++i) {
        const auto& rec = mc->records[i];
        std::string tests, sampled, spans;
        for (int b : rec.test_outcomes) tests += std::to_string(b);
        for (std::size_t k = 0; k < rec.sampled_elements.size(); ++k) {
          sampled += (k ? " " : "") + G.name(rec.sampled_elements[k]);
        }
        for (bool b : rec.span_outcomes) spans += b ? '1' : '0';
        r.rows.push_back({std::to_string(i), std::to_string(rec.reserved_index), tests, sampled, spans,
                          std::to_string(rec.prove_outcome), cell(rec.accepted)});
      }
      artifacts.push_back({"records.csv", r.csv()});
    }
  }
  emit(c, "simulate", args, artifacts, run_manifest(spec), start, out);
  if (violation) {
    err << "bound violation detected\n";
    return kBoundViolation;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// bounds

int cmd_bounds(const Common& c, std::size_t m_min, std::size_t m_max, double p_prove, double q_test,
               const std::vector<std::string>& args, Clock::time_point start, std::ostream& out) {
  if (!c.config.empty()) {
    const RunSpec spec = load_spec(c);
    m_min = spec.m_lo;
    m_max = spec.m_hi;
  }
  if (m_min < 2 || m_min > m_max) throw EmptyRange("m range must satisfy 2 <= m-min <= m-max");
  const GapResult gap = gap_optimize(p_prove, q_test, klein_soundness_bound, m_min, m_max);
  std::vector<Artifact> artifacts;
  std::vector<BoundReport> rows;
  for (std::size_t m = m_min; m <= m_max; ++m) rows.push_back(bound_report(m, p_prove, q_test));
  if (c.json_format("csv")) {
    json j;
    j["rows"] = json::array();
    for (const auto& r : rows) {
      j["rows"].push_back({{"m", r.m},
                           {"soundness_8_over_m", r.soundness_8_over_m},
                           {"klein_bound", r.klein_bound},
                           {"completeness", r.completeness},
                           {"p_prove", r.p_prove},
                           {"q_test", r.q_test},
                           {"p_c", r.p_c},
                           {"gap", r.gap_value}});
    }
    j["optimum"] = {{"m_star", gap.m_star}, {"gap_star", gap.gap_star}, {"p_c", gap.p_c}, {"p_s", gap.p_s}};
    artifacts.push_back({"bounds.json", j.dump(2) + "\n"});
  } else {
    Table t{{"m", "soundness_8_over_m", "klein_bound", "completeness", "p_prove", "q_test", "p_c", "gap", "optimal"},
            {}};
    for (const auto& r : rows) {
      t.rows.push_back({std::to_string(r.m), num(r.soundness_8_over_m), num(r.klein_bound), num(r.completeness),
                        num(r.p_prove), num(r.q_test), num(r.p_c), num(r.gap_value), cell(r.m == gap.m_star)});
    }
    artifacts.push_back({"bounds.csv", t.csv()});
  }
  emit(c, "bounds", args, artifacts, {{"p_prove", p_prove}, {"q_test", q_test}, {"m_range", {m_min, m_max}}}, start,
       out);
  return kOk;
}

// ---------------------------------------------------------------------------
// adversary

int cmd_adversary(const Common& c, std::optional<std::size_t> m_min, std::optional<std::size_t> m_max,
                  const std::string& method_name, const std::vector<std::string>& args, Clock::time_point start,
                  std::ostream& out, std::ostream& err) {
  const RunSpec spec = load_spec(c);
  const FiniteGroup& G = spec.grp();
  const Subgroup& S = spec.sub();
  if (!S.contains(spec.g)) throw std::invalid_argument("adversary needs g inside the subgroup");
  const std::size_t lo = m_min.value_or(spec.m_lo);
  const std::size_t hi = m_max.value_or(spec.m_hi);
  if (lo < 2 || lo > hi) throw EmptyRange("m range must satisfy 2 <= m-min <= m-max");
  const EigenMethod method = method_name == "dense"     ? EigenMethod::Dense
                             : method_name == "lanczos" ? EigenMethod::Lanczos
                                                        : EigenMethod::Auto;
  const bool g_identity = spec.g == G.identity();

  Table t{{"m", "lambda_max", "soundness_8_over_m", "chain_bound", "bound", "margin", "ok", "method", "iterations",
           "residual", "immediate_reject"},
          {}};
  json rows = json::array();
  std::vector<Artifact> states;
  bool violation = false;
  for (std::size_t m = lo; m <= hi; ++m) {
    ProtocolConfig cfg = spec.protocol;
    cfg.m = m;
    const OptimalAdversaryResult res = optimal_adversary(spec.g, S, cfg, method);
    const double bound8 = soundness_bound(m);
    std::optional<double> chain;
    if (!g_identity) chain = soundness_chain_bound(G.element_order(spec.g), S.size(), G.label_bits(), m);
    const double bound = chain ? std::min(bound8, *chain) : bound8;
    const double margin = bound - res.value;
    std::optional<bool> ok;
    if (ideal(cfg)) ok = margin >= -kBoundSlack;
    violation = violation || (ok && !*ok);
    const std::string meth = res.short_circuit ? "none" : to_string(res.method);
    t.rows.push_back({std::to_string(m), num(res.value), num(bound8), cell(chain), num(bound), num(margin), cell(ok),
                      meth, std::to_string(res.iterations), num(res.residual), cell(res.short_circuit)});
    json row = {{"m", m},
                {"lambda_max", res.value},
                {"soundness_8_over_m", bound8},
                {"chain_bound", nullable(chain)},
                {"bound", bound},
                {"margin", margin},
                {"ok", nullable(ok)},
                {"method", meth},
                {"iterations", res.iterations},
                {"residual", res.residual},
                {"immediate_reject", res.short_circuit},
                {"state", res.state ? to_json(*res.state) : json(nullptr)}};
    if (res.state) states.push_back({"state_m" + std::to_string(m) + ".json", to_json(*res.state).dump() + "\n"});
    rows.push_back(std::move(row));
  }
  std::vector<Artifact> artifacts;
  if (c.json_format("csv")) {
    artifacts.push_back({"adversary.json", json{{"run", to_json(spec)}, {"rows", rows}}.dump(2) + "\n"});
  } else {
    artifacts.push_back({"adversary.csv", t.csv()});
    if (!c.out_dir.empty()) artifacts.insert(artifacts.end(), states.begin(), states.end());
  }
  emit(c, "adversary", args, artifacts, run_manifest(spec), start, out);
  if (violation) {
    err << "bound violation detected\n";
    return kBoundViolation;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// appendix

int cmd_appendix(const Common& c, std::size_t n_min, std::size_t n_max, std::size_t instances, std::size_t starts,
                 const std::vector<std::string>& args, Clock::time_point start, std::ostream& out,
                 std::ostream& err) {
  if (n_min < 2 || n_min > n_max || n_max > 10) throw EmptyRange("n range must satisfy 2 <= n-min <= n-max <= 10");
  const std::uint64_t seed = c.seed.value_or(1);
  if (c.trials) instances = *c.trials;
  constexpr double kTol = 1e-5;
  Philox4x32 rng(seed, 0xa99e);
  Table t{{"kind", "n", "b", "l", "closed_form", "bruteforce", "abs_diff", "residual_l", "residual_b", "ok"}, {}};
  json rows = json::array();
  bool failed = false;
  auto record = [&](const std::string& kind, const OmaxInstance& inst, std::optional<double> expected) {
    const double closed = omax_closed_form(inst);
    std::optional<double> brute;
    double rl = std::nan(""), rb = std::nan("");
    std::string note;
    try {
      const OmaxSearchResult r = omax_bruteforce(inst, 1e-10, starts, rng());
      brute = r.value;
      rl = r.residual_l;
      rb = r.residual_b;
    } catch (const ConstraintProjectionFailure& e) {
      note = e.what();
    }
    std::optional<double> diff;
    std::optional<bool> ok;
    if (kind == "excluded") {
      ok = std::nullopt;
    } else {
      bool good = brute.has_value() && std::abs(*brute - closed) <= kTol;
      if (expected) good = good && std::abs(closed - *expected) <= 1e-12;
      ok = good;
      failed = failed || !good;
    }
    if (brute) diff = std::abs(*brute - closed);
    t.rows.push_back({kind, std::to_string(inst.n), num(inst.b), num(inst.l), num(closed), cell(brute), cell(diff),
                      num(rl), num(rb), cell(ok)});
    json row = {{"kind", kind},         {"n", inst.n},          {"b", inst.b},
                {"l", inst.l},          {"closed_form", closed}, {"bruteforce", nullable(brute)},
                {"abs_diff", nullable(diff)}, {"ok", nullable(ok)}};
    if (brute) {
      row["residual_l"] = rl;
      row["residual_b"] = rb;
    }
    if (!note.empty()) row["note"] = note;
    rows.push_back(std::move(row));
  };

  for (std::size_t n = n_min; n <= n_max; ++n) {
    if (n == 2) {
      for (const auto& [b, l] : std::vector<std::pair<double, double>>{{0.3, 0.8}, {-0.5, 1.0}, {0.0, 0.25}}) {
        record("identity_n2", {n, b, l}, b + l);
      }
    }
    record("b_equals_l", {n, 0.7, 0.7}, static_cast<double>(n) * 0.7);
    const double cmin = omax_min_correlation(n);
    for (std::size_t k = 0; k < instances; ++k) {
      const double l = 0.05 + 0.95 * rng.uniform01();
      const double b = l * (cmin + (1.0 - cmin) * rng.uniform01());
      record("random", {n, b, l}, std::nullopt);
    }
    if (n % 2 == 1) record("excluded", {n, -1.0, 1.0}, std::nullopt);
  }

  std::vector<Artifact> artifacts;
  if (c.json_format("csv")) {
    artifacts.push_back({"appendix.json", json{{"tolerance", kTol}, {"rows", rows}}.dump(2) + "\n"});
  } else {
    artifacts.push_back({"appendix.csv", t.csv()});
  }
  emit(c, "appendix", args, artifacts, {{"seed", seed}, {"instances_per_n", instances}, {"starts", starts}}, start,
       out);
  if (failed) {
    err << "closed form and brute force disagree\n";
    return kBoundViolation;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// reproduce-experiment

struct CircuitCell {
  std::string panel;
  std::string subgroup;
  std::string role;
  std::string multiplier;
  std::string state;
  int outcome;
};

int cmd_reproduce(const Common& c, double visibility, double fidelity, const std::vector<std::string>& args,
                  Clock::time_point start, std::ostream& out) {
  const GroupDefinition def = bundled_group("klein");
  const FiniteGroup& G = *def.group;
  const Subgroup S = resolve_named_subgroup(def, "S");
  const Subgroup Sp = resolve_named_subgroup(def, "S'");
  const Element B = G.element("B");
  const std::map<std::string, PureState> states = {
      {"Q", coset_proof_state(S, B)},
      {"Q'", coset_proof_state(Sp, B)},
      {"psi_A", PureState::basis(4, G.element("A").index)},
      {"psi_B", PureState::basis(4, B.index)},
  };
  std::vector<CircuitCell> cells;
  for (const char* st : {"Q", "Q'", "psi_A", "psi_B"}) cells.push_back({"a", "S", "test", "A", st, 0});
  for (const char* g : {"E", "A", "B", "AB"}) cells.push_back({"b", "S", "prove", g, "Q", 1});
  for (const char* st : {"Q'", "Q", "psi_A", "psi_B"}) cells.push_back({"c", "S'", "test", "AB", st, 0});
  for (const char* g : {"E", "A", "B", "AB"}) cells.push_back({"d", "S'", "prove", g, "Q'", 1});

  NoiseSpec noise{visibility, fidelity};
  noise.validate();
  const std::uint64_t trials = c.trials.value_or(0);
  const std::uint64_t seed = c.seed.value_or(0);
  ProtocolConfig mc_cfg;
  mc_cfg.noise = noise;

  Table t{{"panel", "subgroup", "role", "multiplier", "state", "outcome", "ideal", "noisy", "monte_carlo"}, {}};
  json jcells = json::array();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& cl = cells[i];
    const PureState& psi = states.at(cl.state);
    const Element g = G.element(cl.multiplier);
    const CoreOutcome ideal_out = core_circuit(psi, 0, G, g);
    const CoreOutcome noisy_out = core_circuit(psi, 0, G, g, noise);
    const double ideal_p = cl.outcome == 0 ? ideal_out.p0 : ideal_out.p1;
    const double noisy_p = cl.outcome == 0 ? noisy_out.p0 : noisy_out.p1;
    std::optional<double> mc;
    if (trials > 0) {
      std::uint64_t hits = 0;
      for (std::uint64_t k = 0; k < trials; ++k) {
        Philox4x32 rng = Philox4x32(seed, i + 1).split(k);
        const QuantumState prepared = apply_preparation_noise(psi, G, mc_cfg, rng);
        int bit;
        if (!rng.bernoulli(visibility)) {
          bit = static_cast<int>(rng() & 1);
        } else {
          bit = rng.bernoulli(core_circuit(prepared, 0, G, g).p1) ? 1 : 0;
        }
        hits += bit == cl.outcome;
      }
      mc = static_cast<double>(hits) / static_cast<double>(trials);
    }
    t.rows.push_back({cl.panel, cl.subgroup, cl.role, cl.multiplier, cl.state, std::to_string(cl.outcome),
                      num(ideal_p), num(noisy_p), cell(mc)});
    jcells.push_back({{"panel", cl.panel},
                      {"subgroup", cl.subgroup},
                      {"role", cl.role},
                      {"multiplier", cl.multiplier},
                      {"state", cl.state},
                      {"outcome", cl.outcome},
                      {"ideal", ideal_p},
                      {"noisy", noisy_p},
                      {"monte_carlo", nullable(mc)}});
  }

  struct GapLine {
    std::string subgroup;
    double p_prove, q_test;
  };
  Table gaps{{"subgroup", "p_prove", "q_test", "m_star", "gap_star", "p_c", "p_s"}, {}};
  json jgaps = json::array();
  for (const GapLine& gl : {GapLine{"S", 0.496, 0.949}, GapLine{"S'", 0.481, 0.980}}) {
    const GapResult r = gap_optimize(gl.p_prove, gl.q_test, klein_soundness_bound);
    gaps.rows.push_back({gl.subgroup, num(gl.p_prove), num(gl.q_test), std::to_string(r.m_star), num(r.gap_star),
                         num(r.p_c), num(r.p_s)});
    jgaps.push_back({{"subgroup", gl.subgroup},
                     {"p_prove", gl.p_prove},
                     {"q_test", gl.q_test},
                     {"m_star", r.m_star},
                     {"gap_star", r.gap_star},
                     {"p_c", r.p_c},
                     {"p_s", r.p_s}});
  }

  std::vector<Artifact> artifacts;
  if (c.json_format("csv")) {
    json j = {{"noise", to_json(noise)}, {"cells", jcells}, {"gap", jgaps}};
    artifacts.push_back({"experiment.json", j.dump(2) + "\n"});
  } else {
    artifacts.push_back({"cells.csv", t.csv()});
    artifacts.push_back({"gap.csv", gaps.csv()});
  }
  emit(c, "reproduce-experiment", args, artifacts,
       {{"noise", to_json(noise)}, {"trials", trials}, {"seed", seed}, {"group_fingerprint", hex(G.fingerprint())}},
       start, out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto start = Clock::now();
  CLI::App app{"Exact simulation of the shallow-circuit group non-membership protocol", "gnm"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(GNM_VERSION));

  Common common;

  std::string group_source;
  std::vector<std::string> group_subgroups;
  auto* group = app.add_subcommand("group", "Validate a group definition and print its structure");
  group->add_option("source", group_source, "Bundled group name or group JSON path")->required();
  group->add_option("--subgroup", group_subgroups, "Only report these named subgroups");
  add_common(group, common, false);

  bool exact_only = false, mc_only = false, records = false;
  auto* simulate = app.add_subcommand("simulate", "Run the verification protocol for a run config");
  add_common(simulate, common, true);
  auto* exact_flag = simulate->add_flag("--exact", exact_only, "Exact engine only");
  simulate->add_flag("--monte-carlo", mc_only, "Monte Carlo only")->excludes(exact_flag);
  simulate->add_flag("--records", records, "Emit per-trial records");

  std::size_t bm_min = 2, bm_max = 30;
  double p_prove = 0.496, q_test = 0.949;
  auto* bounds = app.add_subcommand("bounds", "Tabulate the soundness bounds and the completeness-soundness gap");
  add_common(bounds, common, true);
  bounds->add_option("--m-min", bm_min, "Smallest m")->capture_default_str();
  bounds->add_option("--m-max", bm_max, "Largest m")->capture_default_str();
  bounds->add_option("--p-prove", p_prove, "Prove-step success probability")->capture_default_str();
  bounds->add_option("--q-test", q_test, "Per-register test pass probability")->capture_default_str();

  std::size_t am_min = 0, am_max = 0;
  std::string method = "auto";
  auto* adversary = app.add_subcommand("adversary", "Optimal cheating probability over all prover states");
  add_common(adversary, common, true);
  auto* am_min_opt = adversary->add_option("--m-min", am_min, "Smallest m (default: config m_range)");
  auto* am_max_opt = adversary->add_option("--m-max", am_max, "Largest m (default: config m_range)");
  adversary->add_option("--method", method, "Eigensolver")
      ->check(CLI::IsMember({"auto", "dense", "lanczos"}))
      ->capture_default_str();

  std::size_t n_min = 2, n_max = 8, instances = 50, starts = 64;
  auto* appendix = app.add_subcommand("appendix", "Closed-form O_max against the brute-force optimizer");
  add_common(appendix, common, false);
  appendix->add_option("--n-min", n_min)->capture_default_str();
  appendix->add_option("--n-max", n_max)->capture_default_str();
  appendix->add_option("--instances", instances, "Random (b, l) instances per n")->capture_default_str();
  appendix->add_option("--starts", starts, "Optimizer starts per instance")->capture_default_str();

  double visibility = 0.963, fidelity = 0.959;
  auto* reproduce = app.add_subcommand("reproduce-experiment", "Klein-group circuit probabilities and gap numbers");
  add_common(reproduce, common, false);
  reproduce->add_option("--visibility", visibility)->capture_default_str();
  reproduce->add_option("--fidelity", fidelity, "state_fidelity_mix")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (group->parsed()) return cmd_group(group_source, group_subgroups, common, args, start, out);
    if (simulate->parsed()) return cmd_simulate(common, exact_only, mc_only, records, args, start, out, err);
    if (bounds->parsed()) return cmd_bounds(common, bm_min, bm_max, p_prove, q_test, args, start, out);
    if (adversary->parsed()) {
      return cmd_adversary(common, am_min_opt->count() ? std::optional(am_min) : std::nullopt,
                           am_max_opt->count() ? std::optional(am_max) : std::nullopt, method, args, start, out, err);
    }
    if (appendix->parsed()) return cmd_appendix(common, n_min, n_max, instances, starts, args, start, out, err);
    if (reproduce->parsed()) return cmd_reproduce(common, visibility, fidelity, args, start, out);
  } catch (const TooLargeForExact& e) {
    err << "error: " << e.what() << '\n';
    return kInfeasible;
  } catch (const GroupTooLarge& e) {
    err << "error: " << e.what() << '\n';
    return kInfeasible;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace gnm::cli
