#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scobot/env.hpp"
#include "scobot/track.hpp"

namespace scobot {

struct ClassSlots {
  std::string cls;
  int max_count = 1;
};

/// Enumerated object slots, e.g. player1, ball1, enemy1, enemy2.
class SlotSchema {
 public:
  SlotSchema(std::string player_class, std::vector<ClassSlots> others);

  static SlotSchema for_game(GameId game);

  const std::string& player_class() const { return player_class_; }
  const std::vector<ClassSlots>& classes() const { return classes_; }  // player first
  const std::vector<std::string>& slot_names() const { return slot_names_; }
  int slot_count() const { return static_cast<int>(slot_names_.size()); }
  int slot_index(std::string_view name) const;  // -1 if absent

 private:
  std::string player_class_;
  std::vector<ClassSlots> classes_;
  std::vector<std::string> slot_names_;
};

enum class ConceptFn { PositionX, PositionY, Distance, Speed, LinearTrajectory };

std::string_view concept_fn_name(ConceptFn fn);
bool is_binary(ConceptFn fn);

struct ConceptDescriptor {
  ConceptFn fn = ConceptFn::PositionX;
  int a = 0;   // slot index
  int b = -1;  // second slot for binary functions

  bool operator==(const ConceptDescriptor&) const = default;
};

/// Fixed, immutable layout of the concept vector.
class ConceptSchema {
 public:
  ConceptSchema(SlotSchema slots, std::vector<ConceptDescriptor> descriptors);

  const SlotSchema& slots() const { return slots_; }
  const std::vector<ConceptDescriptor>& descriptors() const { return descriptors_; }
  int size() const { return static_cast<int>(descriptors_.size()); }

  /// "FUNCTION(slotA[,slotB])"
  std::string feature_name(int index) const;
  int feature_index(std::string_view name) const;  // -1 if absent

  /// One line per descriptor: "INDEX FUNCTION(slotA[,slotB])".
  std::string to_text() const;
  static ConceptSchema from_text(SlotSchema slots, std::string_view text);
  std::uint64_t hash() const { return hash_; }

 private:
  SlotSchema slots_;
  std::vector<ConceptDescriptor> descriptors_;
  std::uint64_t hash_ = 0;
};

struct ConceptVector {
  std::vector<double> values;
  std::uint64_t schema_hash = 0;

  bool operator==(const ConceptVector&) const = default;
};

/// slot index -> track (or empty)
using SlotAssignment = std::vector<std::optional<Track>>;

SlotAssignment assign_slots(std::span<const Track> tracks, const SlotSchema& schema);

ConceptVector compute_concepts(const SlotAssignment& assignment, const ConceptSchema& schema);

ConceptSchema full_schema(GameId game);
ConceptSchema pruned_schema(GameId game);

enum class SchemaKind { Full, Pruned };
ConceptSchema make_schema(GameId game, SchemaKind kind);
SchemaKind parse_schema_kind(std::string_view s);

}  // namespace scobot
