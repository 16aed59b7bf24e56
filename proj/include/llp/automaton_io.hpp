#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "llp/automaton.hpp"
#include "llp/error.hpp"

namespace llp {

namespace detail {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

inline std::vector<std::string> split_tokens(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace detail

/// Parses the line-oriented automaton format:
///
///     alphabet:
///       <event> <c|u>
///     states:
///       <state> [initial] [marked]
///     transitions:
///       <src> <event> <dst>
///
/// Sections appear once each, in this order. `#` starts a comment. A file
/// whose `states:` section is empty denotes the empty language.
inline Automaton parse_automaton(std::string_view text) {
  enum class Section { none, alphabet, states, transitions };
  Section section = Section::none;
  bool seen_alphabet = false, seen_states = false, seen_transitions = false;

  Alphabet sigma;
  Automaton a;
  bool automaton_started = false;
  StateId initial = no_state;

  auto start_automaton = [&] {
    if (!automaton_started) {
      a = Automaton(sigma);
      automaton_started = true;
    }
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = detail::split_tokens(line);
    if (tok.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const std::string where = "line " + std::to_string(line_no) + ": ";

    if (tok.size() == 1 && tok[0].back() == ':') {
      if (tok[0] == "alphabet:" && !seen_alphabet && section == Section::none) {
        section = Section::alphabet;
        seen_alphabet = true;
      } else if (tok[0] == "states:" && !seen_states && seen_alphabet) {
        section = Section::states;
        seen_states = true;
        start_automaton();
      } else if (tok[0] == "transitions:" && !seen_transitions && seen_states) {
        section = Section::transitions;
        seen_transitions = true;
      } else {
        throw FormatError(where + "unexpected section header '" + tok[0] + "'");
      }
      continue;
    }

    switch (section) {
      case Section::none:
        throw FormatError(where + "content before any section header");
      case Section::alphabet: {
        if (tok.size() != 2 || (tok[1] != "c" && tok[1] != "u"))
          throw FormatError(where + "expected '<event> <c|u>'");
        try {
          sigma.add(tok[0], tok[1] == "c");
        } catch (const AlphabetError& e) {
          throw FormatError(where + e.what());
        }
        break;
      }
      case Section::states: {
        bool is_initial = false, is_marked = false;
        for (std::size_t i = 1; i < tok.size(); ++i) {
          if (tok[i] == "initial" && !is_initial) is_initial = true;
          else if (tok[i] == "marked" && !is_marked) is_marked = true;
          else throw FormatError(where + "unexpected token '" + tok[i] + "'");
        }
        const StateId s = a.add_state(tok[0], is_marked);
        if (is_initial) {
          if (initial != no_state) throw FormatError(where + "more than one initial state");
          initial = s;
        }
        break;
      }
      case Section::transitions: {
        if (tok.size() != 3) throw FormatError(where + "expected '<src> <event> <dst>'");
        auto src = a.find_state(tok[0]);
        auto dst = a.find_state(tok[2]);
        auto ev = a.alphabet().find(tok[1]);
        if (!src) throw ReferenceError(where + "unknown state '" + tok[0] + "'");
        if (!dst) throw ReferenceError(where + "unknown state '" + tok[2] + "'");
        if (!ev) throw ReferenceError(where + "unknown event '" + tok[1] + "'");
        try {
          a.add_transition(*src, *ev, *dst);
        } catch (const NondeterminismError& e) {
          throw NondeterminismError(where + e.what());
        }
        break;
      }
    }
  }

  if (!seen_alphabet || !seen_states) throw FormatError("missing 'alphabet:' or 'states:' section");
  if (a.num_states() > 0) {
    if (initial == no_state) throw FormatError("no initial state");
    a.set_initial(initial);
  }
  return a;
}

/// Canonical text: events in alphabet order, states in id order, transitions
/// grouped by source state in event order.
inline std::string serialize_automaton(const Automaton& a) {
  std::ostringstream out;
  if (a.is_empty()) out << "# empty language\n";
  out << "alphabet:\n";
  for (const auto& e : a.alphabet()) out << "  " << e.name << (e.controllable ? " c" : " u") << '\n';
  out << "states:\n";
  if (!a.is_empty()) {
    for (StateId s = 0; s < a.num_states(); ++s) {
      out << "  " << a.state_name(s);
      if (s == a.initial()) out << " initial";
      if (a.is_marked(s)) out << " marked";
      out << '\n';
    }
  }
  out << "transitions:\n";
  if (!a.is_empty()) {
    for (StateId s = 0; s < a.num_states(); ++s)
      for (const auto& e : a.edges(s))
        out << "  " << a.state_name(s) << ' ' << a.alphabet().name(e.event) << ' '
            << a.state_name(e.target) << '\n';
  }
  return out.str();
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Automaton load_automaton(const std::string& path) {
  return parse_automaton(read_text_file(path));
}

inline void save_automaton(const Automaton& a, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << serialize_automaton(a);
}

}  // namespace llp
