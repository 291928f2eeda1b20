#include "advcongest/message.hpp"

#include <stdexcept>

namespace advcongest {

std::uint32_t ceil_log2_at_least1(std::size_t x) {
  std::uint32_t r = 0;
  while ((std::size_t{1} << r) < x) ++r;
  return r == 0 ? 1 : r;
}

std::string to_string(Tag t) {
  switch (t) {
    case Tag::Flood: return "flood";
    case Tag::Accept: return "accept";
    case Tag::HeardHeader: return "heard_header";
    case Tag::HeardEdge: return "heard_edge";
    case Tag::Control: return "control";
  }
  return "control";
}

Tag tag_from_string(const std::string& s) {
  if (s == "flood") return Tag::Flood;
  if (s == "accept") return Tag::Accept;
  if (s == "heard_header") return Tag::HeardHeader;
  if (s == "heard_edge") return Tag::HeardEdge;
  if (s == "control") return Tag::Control;
  throw std::invalid_argument("unknown message tag '" + s + "'");
}

Encoding::Encoding(std::size_t n, std::size_t ell, std::uint32_t beta)
    : node_bits_(ceil_log2_at_least1(n)), index_bits_(ceil_log2_at_least1(ell)), budget_(beta * node_bits_) {
  for (std::size_t t = 0; t < kTags; ++t) fits_[t] = size_bits(Message{static_cast<Tag>(t)}) <= budget_;
}

namespace {

void put(std::vector<bool>& out, std::uint64_t v, std::uint32_t width) {
  for (std::uint32_t i = width; i-- > 0;) out.push_back((v >> i) & 1u);
}

std::uint64_t get(const std::vector<bool>& in, std::size_t& pos, std::uint32_t width) {
  std::uint64_t v = 0;
  for (std::uint32_t i = 0; i < width; ++i) {
    v <<= 1;
    if (pos < in.size()) v |= in[pos] ? 1u : 0u;
    ++pos;
  }
  return v;
}

}  // namespace

std::vector<bool> Encoding::encode(const Message& m) const {
  std::vector<bool> out;
  put(out, static_cast<std::uint8_t>(m.tag), 3);
  switch (m.tag) {
    case Tag::Flood:
      put(out, m.bit, 1);
      put(out, m.a, index_bits_);
      break;
    case Tag::Accept: put(out, m.bit, 1); break;
    case Tag::HeardHeader:
      put(out, m.bit, 1);
      put(out, m.a, node_bits_);
      break;
    case Tag::HeardEdge:
      put(out, m.a, node_bits_);
      put(out, m.b, node_bits_);
      break;
    case Tag::Control: put(out, m.a, 2); break;
  }
  return out;
}

Message Encoding::decode(const std::vector<bool>& bits) const {
  std::size_t pos = 0;
  auto raw = get(bits, pos, 3);
  Message m;
  if (raw > 4) raw = 4;  // unknown tags read as control
  m.tag = static_cast<Tag>(raw);
  switch (m.tag) {
    case Tag::Flood:
      m.bit = static_cast<std::uint8_t>(get(bits, pos, 1));
      m.a = static_cast<std::uint32_t>(get(bits, pos, index_bits_));
      break;
    case Tag::Accept: m.bit = static_cast<std::uint8_t>(get(bits, pos, 1)); break;
    case Tag::HeardHeader:
      m.bit = static_cast<std::uint8_t>(get(bits, pos, 1));
      m.a = static_cast<std::uint32_t>(get(bits, pos, node_bits_));
      break;
    case Tag::HeardEdge:
      m.a = static_cast<std::uint32_t>(get(bits, pos, node_bits_));
      m.b = static_cast<std::uint32_t>(get(bits, pos, node_bits_));
      break;
    case Tag::Control: m.a = static_cast<std::uint32_t>(get(bits, pos, 2)); break;
  }
  return m;
}

Message Encoding::truncate(const Message& m) const {
  auto bits = encode(m);
  if (bits.size() > budget_) bits.resize(budget_);
  return decode(bits);
}

nlohmann::json to_json(const Message& m) {
  nlohmann::json j{{"tag", to_string(m.tag)}};
  switch (m.tag) {
    case Tag::Flood:
      j["bit"] = m.bit;
      j["index"] = m.a;
      break;
    case Tag::Accept: j["bit"] = m.bit; break;
    case Tag::HeardHeader:
      j["bit"] = m.bit;
      j["len"] = m.a;
      break;
    case Tag::HeardEdge:
      j["x"] = m.a;
      j["y"] = m.b;
      break;
    case Tag::Control: {
      static const char* names[] = {"M", "M_T", "StepDone", "unknown"};
      j["kind"] = names[m.a < 3 ? m.a : 3];
      break;
    }
  }
  if (m.inst) j["inst"] = m.inst;
  return j;
}

Message message_from_json(const nlohmann::json& j) {
  Message m;
  m.tag = tag_from_string(j.at("tag").get<std::string>());
  switch (m.tag) {
    case Tag::Flood:
      m.bit = j.at("bit").get<std::uint8_t>();
      m.a = j.at("index").get<std::uint32_t>();
      break;
    case Tag::Accept: m.bit = j.at("bit").get<std::uint8_t>(); break;
    case Tag::HeardHeader:
      m.bit = j.at("bit").get<std::uint8_t>();
      m.a = j.at("len").get<std::uint32_t>();
      break;
    case Tag::HeardEdge:
      m.a = j.at("x").get<std::uint32_t>();
      m.b = j.at("y").get<std::uint32_t>();
      break;
    case Tag::Control: {
      auto k = j.at("kind").get<std::string>();
      m.a = k == "M" ? 0u : k == "M_T" ? 1u : k == "StepDone" ? 2u : 3u;
      break;
    }
  }
  m.inst = j.value("inst", std::uint32_t{0});
  return m;
}

}  // namespace advcongest
