#pragma once

#include <string>
#include <vector>

#include "llp/automaton_io.hpp"
#include "llp/lang_ops.hpp"

namespace llp::testing {

inline std::string fixture_path(const std::string& name) { return std::string(LLP_FIXTURES) + "/" + name + ".aut"; }
inline Automaton fixture(const std::string& name) { return load_automaton(fixture_path(name)); }

inline std::string names(const Alphabet& sigma, const std::vector<EventId>& events) {
  std::string out = "{";
  for (std::size_t i = 0; i < events.size(); ++i) out += (i ? " " : "") + sigma.name(events[i]);
  return out + "}";
}

inline Trace tr(const Alphabet& sigma, const std::string& text) { return parse_trace(sigma, text.empty() ? "<eps>" : text); }

inline std::vector<std::string> formatted(const Alphabet& sigma, const TraceSet& ts) {
  std::vector<std::string> out;
  for (const auto& t : ts) out.push_back(format_trace(sigma, t));
  return out;
}

}  // namespace llp::testing
