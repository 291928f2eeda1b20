#include "advcongest/experiment.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>
#include <type_traits>

#include "advcongest/adversary.hpp"
#include "advcongest/rng.hpp"

namespace advcongest {

namespace {

using nlohmann::json;

std::string to_string(FaultMode m) {
  switch (m) {
    case FaultMode::explicit_list: return "explicit";
    case FaultMode::random: return "random";
    case FaultMode::worst_of_k: return "worst_of_k";
  }
  return "random";
}

json opt(const auto& o) { return o ? json(*o) : json(nullptr); }

// Objects whose keys are not fixed by the schema.
bool free_form(const std::string& path) {
  return path == "graph.params" || path == "graph.inline" || path == "adversary.params";
}

std::string type_name(const json& j) {
  if (j.is_boolean()) return "boolean";
  if (j.is_number()) return "number";
  if (j.is_string()) return "string";
  if (j.is_array()) return "array";
  if (j.is_object()) return "object";
  return "null";
}

// Overlays `user` onto the defaults, rejecting unknown fields and plain
// type mismatches. Optional fields (null defaults) accept any value and are
// checked on extraction.
void overlay(json& base, const json& user, const std::string& path) {
  if (!user.is_object()) throw ConfigError("field '" + path + "': expected object, got " + type_name(user));
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string sub = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("unknown field '" + sub + "'");
    json& slot = base[it.key()];
    if (slot.is_null() || free_form(sub)) {
      slot = it.value();
      continue;
    }
    if (slot.is_object()) {
      overlay(slot, it.value(), sub);
      continue;
    }
    const bool ok = (slot.is_boolean() && it.value().is_boolean()) ||
                    (slot.is_number() && it.value().is_number()) ||
                    (slot.is_string() && it.value().is_string()) || (slot.is_array() && it.value().is_array());
    // m0 and mode-like fields may be given either way; handled on extraction.
    if (!ok && !(sub == "protocol.m0"))
      throw ConfigError("field '" + sub + "': expected " + type_name(slot) + ", got " + type_name(it.value()));
    slot = it.value();
  }
}

template <class T>
T field(const json& doc, const std::string& path) {
  const json* cur = &doc;
  std::size_t pos = 0;
  while (pos <= path.size()) {
    auto dot = path.find('.', pos);
    auto key = path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    cur = &cur->at(key);
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  try {
    if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
      if (cur->is_number_float() || (cur->is_number_integer() && cur->get<std::int64_t>() < 0))
        throw ConfigError("field '" + path + "': expected a non-negative integer");
    }
    return cur->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("field '" + path + "': " + e.what());
  }
}

template <class T>
std::optional<T> optional_field(const json& doc, const std::string& path) {
  const json* cur = &doc;
  std::size_t pos = 0;
  while (true) {
    auto dot = path.find('.', pos);
    cur = &cur->at(path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos));
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  if (cur->is_null()) return std::nullopt;
  return field<T>(doc, path);
}

json defaults_document() {
  ExperimentConfig c;
  return to_json(c);
}

const std::vector<std::string>& protocol_names() {
  static const std::vector<std::string> names{"bb1_known", "bb1_unknown", "bbt", "bbt_unknown",
                                              "expander_broadcast"};
  return names;
}

}  // namespace

json to_json(const ExperimentConfig& c) {
  const auto& p = c.protocol;
  json fam{{"b", p.bbt.family.b}, {"cap", p.bbt.family.cap}, {"drop", opt(p.bbt.family.drop)}};
  json edges = json::array();
  for (const auto& [u, v] : c.faults.edges) edges.push_back({u, v});
  return {
      {"graph",
       {{"kind", c.graph.kind},
        {"params", c.graph.params},
        {"seed", c.graph.seed},
        {"inline", c.graph.inline_graph ? *c.graph.inline_graph : json(nullptr)}}},
      {"protocol",
       {{"name", p.name},
        {"source", p.source},
        {"m0", p.m0 ? json(*p.m0) : json("random")},
        {"D_prime", opt(p.D_prime)},
        {"L", opt(p.L)},
        {"phi_estimate", opt(p.phi_estimate)},
        {"bb1", {{"c1", p.bb1.c1}, {"c2", p.bb1.c2}, {"a1", p.bb1.family.a1}, {"a2", p.bb1.family.a2}}},
        {"bbt", {{"c3", p.bbt.c3}, {"c", p.bbt.c}, {"family", fam}}},
        {"doubling", {{"max_applications", p.doubling.max_applications}}},
        {"expander", {{"c_L", p.c_L}, {"c_f", p.expander.c_f}, {"gamma", p.expander.gamma}}}}},
      {"t", c.t},
      {"adversary", {{"name", c.adversary.name}, {"params", c.adversary.params}}},
      {"faults", {{"mode", to_string(c.faults.mode)}, {"edges", edges}, {"count", opt(c.faults.count)}, {"k", c.faults.k}}},
      {"trials", c.trials},
      {"seed", c.seed},
      {"beta", c.beta},
      {"wake", c.wake == WakeMode::triggered ? "triggered" : "simultaneous"},
      {"local_mode", c.local_mode},
      {"instrument", c.instrument},
      {"record_transcript", c.record_transcript},
      {"max_rounds", c.max_rounds},
  };
}

ExperimentConfig config_from_json(const json& j) {
  json doc = defaults_document();
  overlay(doc, j, "");
  ExperimentConfig c;
  c.graph.kind = field<std::string>(doc, "graph.kind");
  c.graph.params = doc["graph"]["params"];
  if (!c.graph.params.is_object()) throw ConfigError("field 'graph.params': expected object");
  c.graph.seed = field<std::uint64_t>(doc, "graph.seed");
  if (!doc["graph"]["inline"].is_null()) c.graph.inline_graph = doc["graph"]["inline"];

  auto& p = c.protocol;
  p.name = field<std::string>(doc, "protocol.name");
  if (std::find(protocol_names().begin(), protocol_names().end(), p.name) == protocol_names().end())
    throw ConfigError("field 'protocol.name': unknown protocol '" + p.name + "'");
  p.source = field<NodeId>(doc, "protocol.source");
  const auto& m0 = doc["protocol"]["m0"];
  if (m0.is_string()) {
    if (m0.get<std::string>() != "random") throw ConfigError("field 'protocol.m0': expected 0, 1 or \"random\"");
  } else {
    auto v = field<std::uint32_t>(doc, "protocol.m0");
    if (v > 1) throw ConfigError("field 'protocol.m0': expected 0, 1 or \"random\"");
    p.m0 = static_cast<std::uint8_t>(v);
  }
  p.D_prime = optional_field<std::uint32_t>(doc, "protocol.D_prime");
  p.L = optional_field<std::uint32_t>(doc, "protocol.L");
  p.phi_estimate = optional_field<double>(doc, "protocol.phi_estimate");
  p.bb1.c1 = field<double>(doc, "protocol.bb1.c1");
  p.bb1.c2 = field<double>(doc, "protocol.bb1.c2");
  p.bb1.family.a1 = field<double>(doc, "protocol.bb1.a1");
  p.bb1.family.a2 = field<double>(doc, "protocol.bb1.a2");
  p.bbt.c3 = field<double>(doc, "protocol.bbt.c3");
  p.bbt.c = field<double>(doc, "protocol.bbt.c");
  p.bbt.family.b = field<double>(doc, "protocol.bbt.family.b");
  p.bbt.family.cap = field<std::size_t>(doc, "protocol.bbt.family.cap");
  p.bbt.family.drop = optional_field<double>(doc, "protocol.bbt.family.drop");
  p.doubling.max_applications = field<std::uint32_t>(doc, "protocol.doubling.max_applications");
  p.c_L = field<double>(doc, "protocol.expander.c_L");
  p.expander.c_f = field<double>(doc, "protocol.expander.c_f");
  p.expander.gamma = field<double>(doc, "protocol.expander.gamma");
  for (auto [name, v] : {std::pair{"protocol.bb1.c1", p.bb1.c1}, {"protocol.bb1.c2", p.bb1.c2},
                         {"protocol.bb1.a1", p.bb1.family.a1}, {"protocol.bb1.a2", p.bb1.family.a2},
                         {"protocol.bbt.c3", p.bbt.c3}, {"protocol.bbt.c", p.bbt.c}, {"protocol.expander.c_L", p.c_L},
                         {"protocol.expander.c_f", p.expander.c_f}, {"protocol.expander.gamma", p.expander.gamma}})
    if (!(v > 0)) throw ConfigError(std::string("field '") + name + "': must be positive");

  c.t = field<std::uint32_t>(doc, "t");
  if (c.t < 1 || c.t > 4) throw ConfigError("field 't': must lie in [1, 4]");
  c.adversary.name = field<std::string>(doc, "adversary.name");
  auto names = strategy_names();
  if (std::find(names.begin(), names.end(), c.adversary.name) == names.end())
    throw ConfigError("field 'adversary.name': unknown strategy '" + c.adversary.name + "'");
  c.adversary.params = doc["adversary"]["params"];
  if (!c.adversary.params.is_object()) throw ConfigError("field 'adversary.params': expected object");

  const auto mode = field<std::string>(doc, "faults.mode");
  if (mode == "explicit") {
    c.faults.mode = FaultMode::explicit_list;
  } else if (mode == "random") {
    c.faults.mode = FaultMode::random;
  } else if (mode == "worst_of_k") {
    c.faults.mode = FaultMode::worst_of_k;
  } else {
    throw ConfigError("field 'faults.mode': expected explicit, random or worst_of_k");
  }
  for (const auto& e : doc["faults"]["edges"]) {
    if (!e.is_array() || e.size() != 2) throw ConfigError("field 'faults.edges': expected [u, v] pairs");
    c.faults.edges.emplace_back(e[0].get<NodeId>(), e[1].get<NodeId>());
  }
  c.faults.count = optional_field<std::uint32_t>(doc, "faults.count");
  if (c.faults.count && *c.faults.count > c.t) throw ConfigError("field 'faults.count': must not exceed t");
  if (c.faults.edges.size() > c.t) throw ConfigError("field 'faults.edges': more edges than t");
  c.faults.k = field<std::uint32_t>(doc, "faults.k");
  if (c.faults.k == 0) throw ConfigError("field 'faults.k': must be positive");
  c.trials = field<std::uint32_t>(doc, "trials");
  c.seed = field<std::uint64_t>(doc, "seed");
  c.beta = field<std::uint32_t>(doc, "beta");
  if (c.beta == 0) throw ConfigError("field 'beta': must be positive");
  const auto wake = field<std::string>(doc, "wake");
  if (wake == "triggered") {
    c.wake = WakeMode::triggered;
  } else if (wake != "simultaneous") {
    throw ConfigError("field 'wake': expected simultaneous or triggered");
  }
  c.local_mode = field<bool>(doc, "local_mode");
  c.instrument = field<bool>(doc, "instrument");
  c.record_transcript = field<bool>(doc, "record_transcript");
  c.max_rounds = field<Round>(doc, "max_rounds");
  return c;
}

void apply_override(json& doc, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "': expected key=value");
  const auto key = assignment.substr(0, eq);
  const auto text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  if (!doc.is_object()) doc = json::object();
  json* cur = &doc;
  std::size_t pos = 0;
  while (true) {
    auto dot = key.find('.', pos);
    auto part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (part.empty()) throw ConfigError("override '" + assignment + "': empty key segment");
    if (dot == std::string::npos) {
      (*cur)[part] = value;
      break;
    }
    json& next = (*cur)[part];
    if (!next.is_object()) next = json::object();
    cur = &next;
    pos = dot + 1;
  }
}

Graph build_graph(const GraphSpec& spec) {
  if (spec.inline_graph) return graph_from_json(*spec.inline_graph);
  return generate(spec.kind, spec.params, spec.seed);
}

std::uint64_t trial_seed(const ExperimentConfig& c, std::uint32_t trial) { return mix64(c.seed, 0x747269616cULL, trial); }

ExperimentContext::ExperimentContext(const ExperimentConfig& c) : config(c), graph(build_graph(c.graph)) {
  if (c.protocol.source >= graph.n()) throw ConfigError("field 'protocol.source': node out of range");
  diameter = is_connected(graph) ? advcongest::diameter(graph) : 0;
}

std::vector<EdgeSet> draw_fault_sets(const ExperimentContext& ctx, std::uint64_t seed) {
  const auto& c = ctx.config;
  const auto& g = ctx.graph;
  if (c.faults.mode == FaultMode::explicit_list) {
    std::vector<EdgeId> ids;
    for (const auto& [u, v] : c.faults.edges) {
      auto e = g.find_edge(u, v);
      if (!e) throw ConfigError("field 'faults.edges': (" + std::to_string(u) + ", " + std::to_string(v) +
                                ") is not an edge");
      ids.push_back(*e);
    }
    return {EdgeSet(ids)};
  }
  const std::uint32_t count = std::min<std::size_t>(c.faults.count.value_or(c.t), g.m());
  const std::uint32_t sets = c.faults.mode == FaultMode::worst_of_k ? c.faults.k : 1;
  Rng rng(mix64(seed, 0x6661756c7473ULL));
  std::vector<EdgeSet> out;
  std::vector<EdgeId> ids(g.m());
  for (std::uint32_t k = 0; k < sets; ++k) {
    for (EdgeId e = 0; e < g.m(); ++e) ids[e] = e;
    rng.shuffle(ids.begin(), ids.end());
    out.emplace_back(std::vector<EdgeId>(ids.begin(), ids.begin() + count));
  }
  return out;
}

RunResult run_once(const ExperimentContext& ctx, std::uint64_t seed, std::uint8_t m0, const EdgeSet& faults) {
  const auto& c = ctx.config;
  const auto& p = c.protocol;
  const Graph& g = ctx.graph;
  const bool spontaneous = c.adversary.params.value("spontaneous", false);
  const std::uint64_t proto_seed = mix64(seed, 0x70726f746fULL);
  const std::uint32_t D = std::max<std::uint32_t>(1, ctx.diameter);

  std::unique_ptr<Protocol> proto;
  if (p.name == "bb1_known" || p.name == "bb1_unknown") {
    BB1Config cfg = p.bb1;
    cfg.seed = proto_seed;
    cfg.source_active = !spontaneous;
    cfg.instrument.queue_delay = c.instrument;
    cfg.instrument.audit_faults = faults;
    if (p.name == "bb1_known") {
      proto = bb1_known(g, p.source, m0, p.D_prime.value_or(D), cfg);
    } else {
      DoublingConfig d = p.doubling;
      d.triggered_wakeup = c.wake == WakeMode::triggered;
      proto = bb1_unknown(g, p.source, m0, cfg, d);
    }
  } else if (p.name == "bbt" || p.name == "bbt_unknown") {
    BBTConfig cfg = p.bbt;
    cfg.seed = proto_seed;
    cfg.source_active = !spontaneous;
    if (p.name == "bbt") {
      const auto L = p.L.value_or((6 * c.t + 2) * D);
      auto fam = std::make_shared<const CoveringFamily>(build_sampled_family(g, L, 2 * c.t, proto_seed, cfg.family));
      proto = bbt(g, std::move(fam), p.source, m0, L, c.t, cfg);
    } else {
      proto = bbt_unknown(g, p.source, m0, c.t, cfg, p.doubling);
    }
  } else {
    ExpanderBroadcastConfig cfg;
    cfg.c_L = p.c_L;
    cfg.family = p.expander;
    cfg.bbt = p.bbt;
    cfg.bbt.source_active = !spontaneous;
    double phi = 0;
    if (p.phi_estimate) {
      phi = *p.phi_estimate;
    } else if (g.n() <= 16) {
      phi = conductance(g).conductance.value();
    } else {
      phi = conductance_estimate(g).lower;
    }
    proto = expander_broadcast(g, p.source, m0, c.t, phi, proto_seed, cfg);
  }

  json params = c.adversary.params;
  if (!params.contains("bit")) params["bit"] = 1 - m0;
  if (!params.contains("source")) params["source"] = p.source;
  auto adv = make_strategy(c.adversary.name, params, g, faults);

  EngineConfig ecfg;
  ecfg.t = c.t;
  ecfg.beta = c.beta;
  ecfg.wake = c.wake;
  ecfg.local_mode = c.local_mode;
  ecfg.record_transcript = c.record_transcript;
  ecfg.max_rounds = c.max_rounds;
  return Engine(g, ecfg, mix64(seed, 0x656e67696e65ULL)).run(*proto, *adv, faults);
}

TrialOutcome run_trial(const ExperimentContext& ctx, std::uint32_t trial) {
  TrialOutcome o;
  o.trial = trial;
  o.seed = trial_seed(ctx.config, trial);
  o.m0 = ctx.config.protocol.m0.value_or(static_cast<std::uint8_t>(mix64(o.seed, 0x6d30ULL) & 1u));
  bool have = false;
  for (const auto& f : draw_fault_sets(ctx, o.seed)) {
    auto res = run_once(ctx, o.seed, o.m0, f);
    CandidateSummary s{f, res.report.safety, res.report.liveness, res.report.rounds_used,
                       res.report.diameter_estimate};
    o.all_safe = o.all_safe && s.safety;
    o.all_live = o.all_live && s.liveness;
    o.candidates.push_back(s);
    auto rank = [](bool safe, bool live, Round r) { return std::tuple(!safe, !live, r); };
    if (!have || rank(s.safety, s.liveness, s.rounds_used) >
                     rank(o.report.safety, o.report.liveness, o.report.rounds_used)) {
      have = true;
      o.faults = f;
      o.report = std::move(res.report);
      o.transcript = std::move(res.transcript);
    }
  }
  return o;
}

std::vector<TrialOutcome> run_experiment(const ExperimentConfig& c) {
  ExperimentContext ctx(c);
  std::vector<TrialOutcome> out;
  for (std::uint32_t i = 0; i < c.trials; ++i) out.push_back(run_trial(ctx, i));
  return out;
}

std::string csv_header() {
  return "schema_version,trial,seed,protocol,adversary,graph,n,m,diameter,t,faults,m0,rounds_used,safety,liveness,"
         "horizon_exceeded,ell,width,diameter_estimate,honest_messages,adversary_messages,max_queue_delay,"
         "candidates,all_safe,all_live";
}

std::string csv_row(const ExperimentContext& ctx, const TrialOutcome& o) {
  const auto& r = o.report;
  const auto& g = ctx.graph;
  std::ostringstream os;
  std::string faults;
  for (auto e : o.faults) {
    if (!faults.empty()) faults += ';';
    faults += std::to_string(g.edge(e).u) + "-" + std::to_string(g.edge(e).v);
  }
  std::uint64_t qd = 0;
  for (const auto& q : r.queue_delay) qd = std::max(qd, q.delay);
  auto b = [](bool v) { return v ? "1" : "0"; };
  os << kCsvSchemaVersion << ',' << o.trial << ',' << o.seed << ',' << r.protocol << ',' << ctx.config.adversary.name
     << ',' << (ctx.config.graph.inline_graph ? "inline" : ctx.config.graph.kind) << ',' << g.n() << ',' << g.m()
     << ',' << ctx.diameter << ',' << ctx.config.t << ',' << faults << ',' << int(o.m0) << ',' << r.rounds_used << ','
     << b(r.safety) << ',' << b(r.liveness) << ',' << b(r.horizon_exceeded) << ',' << r.ell << ',' << r.width << ','
     << (r.diameter_estimate ? std::to_string(*r.diameter_estimate) : "") << ',' << r.honest_messages << ','
     << r.adversary_messages << ',' << qd << ',' << o.candidates.size() << ',' << b(o.all_safe) << ','
     << b(o.all_live);
  return os.str();
}

json trial_report(const ExperimentContext& ctx, const TrialOutcome& o) {
  const auto& g = ctx.graph;
  json faults = json::array();
  for (auto e : o.faults) faults.push_back({g.edge(e).u, g.edge(e).v});
  json cands = json::array();
  for (const auto& c : o.candidates) {
    json f = json::array();
    for (auto e : c.faults) f.push_back({g.edge(e).u, g.edge(e).v});
    json entry{{"faults", f}, {"safety", c.safety}, {"liveness", c.liveness}, {"rounds_used", c.rounds_used}};
    if (c.diameter_estimate) entry["diameter_estimate"] = *c.diameter_estimate;
    cands.push_back(std::move(entry));
  }
  return {{"schema_version", kCsvSchemaVersion},
          {"trial", o.trial},
          {"seed", o.seed},
          {"m0", o.m0},
          {"faults", faults},
          {"graph", {{"n", g.n()}, {"m", g.m()}, {"diameter", ctx.diameter}}},
          {"config", to_json(ctx.config)},
          {"report", to_json(o.report)},
          {"candidates", cands},
          {"all_safe", o.all_safe},
          {"all_live", o.all_live}};
}

}  // namespace advcongest
