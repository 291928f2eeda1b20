#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "advcongest/covering.hpp"
#include "advcongest/experiment.hpp"
#include "advcongest/rng.hpp"

namespace advcongest::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  out << text;
}

std::string trial_name(std::uint32_t i, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "trial_%04u%s", i, ext);
  return buf;
}

struct SimulateResult {
  std::vector<TrialOutcome> outcomes;
  std::uint32_t diameter = 0;
  std::size_t n = 0;
  bool ok = true;
};

SimulateResult simulate(const json& doc, const fs::path& out) {
  const auto cfg = config_from_json(doc);
  ExperimentContext ctx(cfg);
  SimulateResult res;
  res.diameter = ctx.diameter;
  res.n = ctx.graph.n();
  for (std::uint32_t i = 0; i < cfg.trials; ++i) res.outcomes.push_back(run_trial(ctx, i));

  fs::create_directories(out);
  write_file(out / "config.json", to_json(cfg).dump(2) + "\n");
  std::string csv = csv_header() + "\n";
  for (const auto& o : res.outcomes) {
    write_file(out / trial_name(o.trial, ".json"), trial_report(ctx, o).dump(2) + "\n");
    if (cfg.record_transcript) write_file(out / trial_name(o.trial, ".jsonl"), to_jsonl(o.transcript, ctx.graph));
    csv += csv_row(ctx, o) + "\n";
    res.ok = res.ok && o.all_safe && o.all_live;
  }
  write_file(out / "results.csv", csv);
  return res;
}

std::string median(std::vector<Round> v) {
  if (v.empty()) return "";
  std::sort(v.begin(), v.end());
  const auto h = v.size() / 2;
  if (v.size() % 2) return std::to_string(v[h]);
  const Round sum = v[h - 1] + v[h];
  return std::to_string(sum / 2) + (sum % 2 ? ".5" : "");
}

std::string dir_safe(std::string s) {
  for (auto& ch : s)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' || ch == '_')) ch = '_';
  return s;
}

}  // namespace

json load_config(const std::optional<fs::path>& file, const std::vector<std::string>& sets) {
  json doc = json::object();
  if (file) {
    try {
      doc = json::parse(read_file(*file));
    } catch (const json::parse_error& e) {
      throw ConfigError("config '" + file->string() + "': " + e.what());
    }
  }
  for (const auto& s : sets) apply_override(doc, s);
  return doc;
}

int cmd_simulate(const json& doc, const fs::path& out, std::ostream& log) {
  auto res = simulate(doc, out);
  std::size_t unsafe = 0, dead = 0;
  for (const auto& o : res.outcomes) {
    unsafe += !o.all_safe;
    dead += !o.all_live;
  }
  log << res.outcomes.size() << " trials, " << unsafe << " unsafe, " << dead << " not live; reports in "
      << out.string() << "\n";
  return res.ok ? kOk : kVerdictFailed;
}

int cmd_sweep(const json& doc, const std::string& vary, const std::vector<std::string>& values, const fs::path& out,
              std::ostream& log) {
  fs::create_directories(out);
  std::string table = "schema_version,parameter,value,n,diameter,trials,median_rounds,max_rounds,safe,unsafe,live,"
                      "not_live\n";
  bool ok = true;
  for (const auto& value : values) {
    json d = doc;
    apply_override(d, vary + "=" + value);
    auto res = simulate(d, out / dir_safe(vary + "=" + value));
    std::vector<Round> rounds;
    std::size_t safe = 0, live = 0;
    for (const auto& o : res.outcomes) {
      rounds.push_back(o.report.rounds_used);
      safe += o.all_safe;
      live += o.all_live;
    }
    const auto trials = res.outcomes.size();
    const Round worst = rounds.empty() ? 0 : *std::max_element(rounds.begin(), rounds.end());
    table += std::to_string(kCsvSchemaVersion) + "," + vary + "," + value + "," + std::to_string(res.n) + "," +
             std::to_string(res.diameter) + "," + std::to_string(trials) + "," + median(rounds) + "," +
             std::to_string(worst) + "," + std::to_string(safe) + "," + std::to_string(trials - safe) + "," +
             std::to_string(live) + "," + std::to_string(trials - live) + "\n";
    log << vary << "=" << value << ": median rounds " << median(rounds) << ", max " << worst << "\n";
    ok = ok && res.ok;
  }
  write_file(out / "sweep.csv", table);
  return ok ? kOk : kVerdictFailed;
}

int cmd_verify_cover(const json& doc, const CoverOptions& opt, const fs::path& out, std::ostream& log) {
  const auto cfg = config_from_json(doc);
  ExperimentContext ctx(cfg);
  const Graph& g = ctx.graph;
  const std::uint32_t L = opt.L.value_or(7 * std::max<std::uint32_t>(1, ctx.diameter));
  const bool directed = opt.flavor == "expander_directed";
  const bool strict = !opt.relaxed && !directed && g.n() <= 10 && opt.k <= 2;

  json runs = json::array();
  std::uint32_t passed = 0;
  for (std::uint32_t s = 0; s < opt.seeds; ++s) {
    const auto seed = mix64(cfg.seed, 0x636f766572ULL, s);
    CoveringFamily fam = [&] {
      if (opt.flavor == "hash") return build_hash_family(g, L, seed, cfg.protocol.bb1.family);
      if (opt.flavor == "sampled") return build_sampled_family(g, L, opt.k, seed, cfg.protocol.bbt.family);
      if (opt.flavor == "expander" || directed)
        return build_expander_family(g, cfg.t, seed, directed, cfg.protocol.expander, L);
      if (opt.flavor == "trivial") return trivial_family(g);
      throw ConfigError("unknown family flavor '" + opt.flavor + "'");
    }();
    const auto check = strict ? verify_strict(fam, g, L, opt.k) : verify_relaxed(fam, g, L, opt.k);
    passed += check.ok;
    json r{{"seed", seed}, {"ell", fam.ell()}, {"width", width(fam, g)}, {"cases", check.cases}, {"ok", check.ok}};
    if (check.counterexample) {
      const auto& cx = *check.counterexample;
      json faults = json::array();
      for (auto e : cx.faults) faults.push_back({g.edge(e).u, g.edge(e).v});
      r["counterexample"] = {{"u", cx.u}, {"v", cx.v}, {"faults", faults}};
      log << "seed " << s << ": FAIL u=" << cx.u << " v=" << cx.v << " faults=" << faults.dump() << "\n";
    }
    runs.push_back(std::move(r));
  }
  log << (strict ? "strict" : "relaxed") << " check, L=" << L << ", k=" << opt.k << ": " << passed << "/"
      << opt.seeds << " seeds pass\n";
  if (!out.empty()) {
    fs::create_directories(out);
    json rep{{"flavor", opt.flavor}, {"L", L},          {"k", opt.k},
             {"mode", strict ? "strict" : "relaxed"}, {"passed", passed}, {"seeds", opt.seeds},
             {"runs", runs},        {"config", to_json(cfg)}};
    write_file(out / "verify_cover.json", rep.dump(2) + "\n");
  }
  return passed == opt.seeds ? kOk : kVerdictFailed;
}

int cmd_conductance(const json& doc, const fs::path& out, std::ostream& log) {
  const auto cfg = config_from_json(doc);
  const Graph g = build_graph(cfg.graph);
  json rep{{"n", g.n()}, {"m", g.m()}};
  if (g.n() <= kExactCutThreshold) {
    const auto cut = conductance(g);
    rep["exact"] = true;
    rep["conductance"] = cut.conductance.value();
    rep["num"] = cut.conductance.num;
    rep["den"] = cut.conductance.den;
    rep["boundary"] = cut.boundary;
    rep["side"] = cut.side;
    log << "phi = " << cut.conductance.num << "/" << cut.conductance.den << " (exact)\n";
  } else {
    const auto est = conductance_estimate(g);
    rep["exact"] = false;
    rep["lambda2"] = est.lambda2;
    rep["lower"] = est.lower;
    rep["upper"] = est.upper;
    log << "lambda2 = " << est.lambda2 << ", " << est.lower << " <= phi <= " << est.upper << "\n";
  }
  if (!out.empty()) {
    fs::create_directories(out);
    write_file(out / "conductance.json", rep.dump(2) + "\n");
  }
  return kOk;
}

int cmd_replay(const fs::path& report, const fs::path& transcript, const fs::path& out, std::ostream& log) {
  json rep;
  try {
    rep = json::parse(read_file(report));
  } catch (const json::parse_error& e) {
    throw ConfigError("report '" + report.string() + "': " + e.what());
  }
  const std::string recorded = read_file(transcript);
  json doc = rep.at("config");
  doc["record_transcript"] = true;
  doc["adversary"]["name"] = "scripted";
  auto cfg = config_from_json(doc);
  cfg.adversary.params["schedule"] = recorded;
  ExperimentContext ctx(cfg);
  std::vector<EdgeId> ids;
  for (const auto& f : rep.at("faults")) {
    auto e = ctx.graph.find_edge(f.at(0).get<NodeId>(), f.at(1).get<NodeId>());
    if (!e) throw ConfigError("report lists a fault that is not an edge");
    ids.push_back(*e);
  }
  const auto res =
      run_once(ctx, rep.at("seed").get<std::uint64_t>(), rep.at("m0").get<std::uint8_t>(), EdgeSet(std::move(ids)));
  const std::string replayed = to_jsonl(res.transcript, ctx.graph);
  const bool same = replayed == recorded;
  const bool verdicts_same = to_json(res.report)["verdicts"] == rep.at("report").at("verdicts");
  log << "transcript " << (same ? "identical" : "differs") << ", verdicts " << (verdicts_same ? "match" : "differ")
      << "\n";
  if (!out.empty()) {
    fs::create_directories(out);
    write_file(out / "replay.jsonl", replayed);
    write_file(out / "replay.json",
               json{{"identical", same}, {"verdicts_match", verdicts_same}, {"report", to_json(res.report)}}.dump(2) +
                   "\n");
  }
  return same && verdicts_same ? kOk : kVerdictFailed;
}

}  // namespace advcongest::cli
