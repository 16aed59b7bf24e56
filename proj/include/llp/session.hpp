#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "llp/lang_ops.hpp"
#include "llp/lookahead.hpp"
#include "llp/plant.hpp"

namespace llp {

/// Work done by a supervisor for one decision.
struct StepStats {
  std::uint64_t expanded = 0;
  std::uint64_t reused = 0;
};

template <class Token>
using Supervisor = std::function<ControlDecision(const Token&, StepStats&)>;

struct LogEntry {
  std::size_t step = 0;
  std::optional<EventId> event;  // absent when the source stopped at this step
  ControlDecision decision;      // decision in force before the event
  bool rejected = false;         // event refused; state unchanged
  StepStats stats;
  std::chrono::steady_clock::time_point at;
};

enum class StopReason { source_exhausted, deadlock, step_cap, quit };

struct TraceLog {
  std::vector<LogEntry> entries;
  StopReason stop = StopReason::source_exhausted;

  bool any_runtime_error() const {
    for (const auto& e : entries)
      if (e.decision.runtime_error) return true;
    return false;
  }
  std::size_t rejections() const {
    std::size_t n = 0;
    for (const auto& e : entries) n += e.rejected;
    return n;
  }
};

/// What a source sees before choosing the next event.
struct SourceView {
  const Alphabet& alphabet;
  const Trace& trace;
  const std::vector<EventId>& active;
  const ControlDecision& decision;
};

/// Returns the next event, or nullopt to stop.
using EventSource = std::function<std::optional<EventId>(const SourceView&)>;

inline EventSource scripted_source(Trace script) {
  return [script = std::move(script), i = std::size_t{0}](const SourceView&) mutable -> std::optional<EventId> {
    if (i >= script.size()) return std::nullopt;
    return script[i++];
  };
}

/// Uniform over the enabled events that are active; stops when none exist.
inline EventSource random_source(std::uint64_t seed) {
  return [rng = std::mt19937_64(seed)](const SourceView& v) mutable -> std::optional<EventId> {
    std::vector<EventId> choices;
    for (EventId e : v.active)
      if (v.decision.enables(e)) choices.push_back(e);
    if (choices.empty()) return std::nullopt;
    std::uniform_int_distribution<std::size_t> pick(0, choices.size() - 1);
    return choices[pick(rng)];
  };
}

inline std::string format_event_set(const Alphabet& sigma, const std::vector<EventId>& events) {
  std::string out = "{";
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (i) out += ' ';
    out += sigma.name(events[i]);
  }
  return out + "}";
}

/// REPL: prints `s=<trace> enabled={...} uncontrollable={...}> ` and reads one
/// event name or `quit` per line. Unknown names re-prompt.
inline EventSource interactive_source(std::istream& in, std::ostream& out) {
  return [&in, &out](const SourceView& v) -> std::optional<EventId> {
    std::vector<EventId> uc;
    for (EventId e : v.active)
      if (!v.alphabet.controllable(e)) uc.push_back(e);
    for (;;) {
      out << "s=" << format_trace(v.alphabet, v.trace) << " enabled=" << format_event_set(v.alphabet, v.decision.enabled)
          << " uncontrollable=" << format_event_set(v.alphabet, uc) << "> " << std::flush;
      std::string line;
      if (!std::getline(in, line)) return std::nullopt;
      const auto tok = detail::split_tokens(line);
      if (tok.empty()) continue;
      if (tok[0] == "quit") return std::nullopt;
      if (auto id = v.alphabet.find(tok[0])) return *id;
      out << "unknown event '" << tok[0] << "'\n";
    }
  };
}

/// One online supervision run over a generative plant.
template <GenerativePlant P>
class SupervisionSession {
 public:
  using Token = typename P::token_type;

  SupervisionSession(const P& plant, Supervisor<Token> supervisor)
      : plant_(&plant), supervisor_(std::move(supervisor)), token_(plant.initial()) {}

  const Token& token() const { return token_; }
  const Trace& trace() const { return trace_; }
  const TraceLog& log() const { return log_; }

  /// Runs until the source stops, the plant deadlocks, or `max_steps` source
  /// events have been consumed.
  const TraceLog& run(const EventSource& source, std::size_t max_steps) {
    const Alphabet& sigma = plant_->alphabet();
    for (std::size_t step = 0;; ++step) {
      if (step >= max_steps) {
        log_.stop = StopReason::step_cap;
        break;
      }
      const auto active = plant_->active(token_);
      StepStats stats;
      ControlDecision d = supervisor_(token_, stats);
      LogEntry entry{step, std::nullopt, d, false, stats, std::chrono::steady_clock::now()};
      if (active.empty()) {
        log_.entries.push_back(std::move(entry));
        log_.stop = StopReason::deadlock;
        break;
      }
      const auto ev = source(SourceView{sigma, trace_, active, d});
      entry.event = ev;
      if (!ev) {
        log_.entries.push_back(std::move(entry));
        log_.stop = StopReason::source_exhausted;
        break;
      }
      const bool is_active = std::find(active.begin(), active.end(), *ev) != active.end();
      entry.rejected = !is_active || (sigma.controllable(*ev) && !d.enables(*ev));
      if (!entry.rejected) {
        token_ = plant_->step(token_, *ev);
        trace_.push_back(*ev);
      }
      log_.entries.push_back(std::move(entry));
    }
    return log_;
  }

 private:
  const P* plant_;
  Supervisor<Token> supervisor_;
  Token token_;
  Trace trace_;
  TraceLog log_;
};

/// CSV `step,event,enabled_set,error`. The error column is `runtime`,
/// `rejected`, both joined by `;`, or `-`. A final row with an empty event
/// records the decision at the state where the run stopped.
inline void write_trace_csv(std::ostream& out, const Alphabet& sigma, const TraceLog& log) {
  out << "step,event,enabled_set,error\n";
  for (const auto& e : log.entries) {
    std::string err;
    if (e.decision.runtime_error) err = "runtime";
    if (e.rejected) err += err.empty() ? "rejected" : ";rejected";
    if (err.empty()) err = "-";
    out << e.step << ',' << (e.event ? sigma.name(*e.event) : std::string()) << ','
        << format_event_set(sigma, e.decision.enabled) << ',' << err << '\n';
  }
}

/// CSV `step,expanded,reused,decision_size,error`.
inline void write_expansion_csv(std::ostream& out, const TraceLog& log) {
  out << "step,expanded,reused,decision_size,error\n";
  for (const auto& e : log.entries)
    out << e.step << ',' << e.stats.expanded << ',' << e.stats.reused << ',' << e.decision.enabled.size()
        << ',' << (e.decision.runtime_error ? 1 : 0) << '\n';
}

/// LLP supervisor backed by the memoized evaluator; `expanded` reports the
/// size of the full window tree the decision stands for.
template <LabeledPlant P>
Supervisor<typename P::token_type> llp_supervisor(const P& plant, Attitude a, unsigned window) {
  auto eval = std::make_shared<WindowEvaluator<P>>(plant, a);
  auto sizes = std::make_shared<TreeSizeCounter<P>>(plant);
  return [eval, sizes, window](const typename P::token_type& t, StepStats& st) {
    st.expanded = sizes->count(t, window);
    return eval->decide(t, window);
  };
}

}  // namespace llp
