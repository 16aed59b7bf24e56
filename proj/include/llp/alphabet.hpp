#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "llp/error.hpp"

namespace llp {

using EventId = std::uint32_t;

struct Event {
  std::string name;
  bool controllable = true;

  bool operator==(const Event&) const = default;
};

/// Ordered event set partitioned into controllable and uncontrollable events.
/// Event ids are positions in insertion order.
class Alphabet {
 public:
  Alphabet() = default;

  EventId add(std::string name, bool controllable) {
    if (name.empty()) throw AlphabetError("event name must not be empty");
    if (index_.contains(name)) throw AlphabetError("duplicate event '" + name + "'");
    const auto id = static_cast<EventId>(events_.size());
    index_.emplace(name, id);
    events_.push_back(Event{std::move(name), controllable});
    return id;
  }

  /// Adds the event unless an event of that name exists; a controllability
  /// mismatch with the existing event is an AlphabetError.
  EventId merge_event(const Event& e) {
    if (auto id = find(e.name)) {
      if (events_[*id].controllable != e.controllable)
        throw AlphabetError("controllability clash on event '" + e.name + "'");
      return *id;
    }
    return add(e.name, e.controllable);
  }

  std::optional<EventId> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  EventId at(std::string_view name) const {
    if (auto id = find(name)) return *id;
    throw ReferenceError("unknown event '" + std::string(name) + "'");
  }

  const Event& operator[](EventId id) const { return events_[id]; }
  const std::string& name(EventId id) const { return events_[id].name; }
  bool controllable(EventId id) const { return events_[id].controllable; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

  const std::vector<Event>& events() const { return events_; }
  auto begin() const { return events_.begin(); }
  auto end() const { return events_.end(); }

  bool operator==(const Alphabet& o) const { return events_ == o.events_; }

  /// Union by name; shared names must agree on controllability.
  static Alphabet merge(const Alphabet& a, const Alphabet& b) {
    Alphabet out = a;
    for (const auto& e : b) out.merge_event(e);
    return out;
  }

 private:
  std::vector<Event> events_;
  std::unordered_map<std::string, EventId> index_;
};

}  // namespace llp
