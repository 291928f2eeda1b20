#include <sstream>
#include <stdexcept>

#include "advcongest/engine.hpp"

namespace advcongest {

bool Transcript::operator==(const Transcript& o) const {
  if (records.size() != o.records.size()) return false;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& a = records[i];
    const auto& b = o.records[i];
    if (a.round != b.round || a.dir != b.dir || a.sent != b.sent || a.delivered != b.delivered) return false;
  }
  return true;
}

std::string to_jsonl(const Transcript& t, const Graph& g) {
  std::ostringstream os;
  for (const auto& r : t.records) {
    nlohmann::json j{{"round", r.round},
                     {"from", g.dir_tail(r.dir)},
                     {"to", g.dir_head(r.dir)},
                     {"edge", r.dir >> 1},
                     {"sent", r.sent ? to_json(*r.sent) : nlohmann::json(nullptr)},
                     {"delivered", r.delivered ? to_json(*r.delivered) : nlohmann::json(nullptr)}};
    os << j.dump() << '\n';
  }
  return os.str();
}

Transcript transcript_from_jsonl(const std::string& text, const Graph& g) {
  Transcript t;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument("transcript line " + std::to_string(lineno) + ": " + e.what());
    }
    TranscriptRecord r;
    r.round = j.at("round").get<Round>();
    auto from = j.at("from").get<NodeId>();
    auto to = j.at("to").get<NodeId>();
    auto e = g.find_edge(from, to);
    if (!e) throw std::invalid_argument("transcript line " + std::to_string(lineno) + ": not an edge");
    r.dir = g.dir(*e, from);
    if (!j.at("sent").is_null()) r.sent = message_from_json(j.at("sent"));
    if (!j.at("delivered").is_null()) r.delivered = message_from_json(j.at("delivered"));
    t.records.push_back(std::move(r));
  }
  return t;
}

}  // namespace advcongest
