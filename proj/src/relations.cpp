#include "scobot/relations.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scobot {

SlotSchema::SlotSchema(std::string player_class, std::vector<ClassSlots> others)
    : player_class_(std::move(player_class)) {
  classes_.push_back({player_class_, 1});
  for (auto& c : others) {
    if (c.cls == player_class_) throw ContractError("SlotSchema: player class listed twice");
    if (c.max_count < 1) throw ContractError("SlotSchema: slot count must be positive");
    classes_.push_back(std::move(c));
  }
  for (const auto& c : classes_)
    for (int i = 1; i <= c.max_count; ++i) slot_names_.push_back(c.cls + std::to_string(i));
}

SlotSchema SlotSchema::for_game(GameId game) {
  switch (game) {
    case GameId::Paddles: return SlotSchema("player", {{"ball", 1}, {"enemy", 1}});
    case GameId::Brawl: return SlotSchema("player", {{"enemy", 1}});
    case GameId::Slalom:
      return SlotSchema("player", {{"flag", 2}, {"tree", 2}, {"mogul", 1}});
  }
  throw ContractError("unknown game");
}

int SlotSchema::slot_index(std::string_view name) const {
  for (std::size_t i = 0; i < slot_names_.size(); ++i)
    if (slot_names_[i] == name) return static_cast<int>(i);
  return -1;
}

std::string_view concept_fn_name(ConceptFn fn) {
  switch (fn) {
    case ConceptFn::PositionX: return "POSITION_X";
    case ConceptFn::PositionY: return "POSITION_Y";
    case ConceptFn::Distance: return "DISTANCE";
    case ConceptFn::Speed: return "SPEED";
    case ConceptFn::LinearTrajectory: return "LINEAR_TRAJECTORY";
  }
  return "?";
}

bool is_binary(ConceptFn fn) {
  return fn == ConceptFn::Distance || fn == ConceptFn::LinearTrajectory;
}

namespace {

ConceptFn parse_fn(std::string_view s) {
  for (ConceptFn fn : {ConceptFn::PositionX, ConceptFn::PositionY, ConceptFn::Distance,
                       ConceptFn::Speed, ConceptFn::LinearTrajectory})
    if (concept_fn_name(fn) == s) return fn;
  throw ContractError("unknown concept function '" + std::string(s) + "'");
}

// Parses "FUNCTION(slotA[,slotB])".
ConceptDescriptor parse_descriptor(const SlotSchema& slots, std::string_view text) {
  const auto open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')')
    throw ContractError("malformed concept '" + std::string(text) + "'");
  ConceptDescriptor d;
  d.fn = parse_fn(text.substr(0, open));
  const std::string_view args = text.substr(open + 1, text.size() - open - 2);
  const auto comma = args.find(',');
  const std::string_view first = args.substr(0, comma);
  d.a = slots.slot_index(first);
  if (d.a < 0) throw ContractError("undeclared slot '" + std::string(first) + "'");
  if (comma != std::string_view::npos) {
    const std::string_view second = args.substr(comma + 1);
    d.b = slots.slot_index(second);
    if (d.b < 0) throw ContractError("undeclared slot '" + std::string(second) + "'");
  }
  if (is_binary(d.fn) != (d.b >= 0))
    throw ContractError("wrong arity in concept '" + std::string(text) + "'");
  return d;
}

}  // namespace

ConceptSchema::ConceptSchema(SlotSchema slots, std::vector<ConceptDescriptor> descriptors)
    : slots_(std::move(slots)), descriptors_(std::move(descriptors)) {
  for (const auto& d : descriptors_) {
    if (d.a < 0 || d.a >= slots_.slot_count())
      throw ContractError("ConceptSchema: descriptor references an undeclared slot");
    if (is_binary(d.fn) != (d.b >= 0) || d.b >= slots_.slot_count())
      throw ContractError("ConceptSchema: descriptor arity or slot invalid");
  }
  hash_ = fnv1a(to_text());
}

std::string ConceptSchema::feature_name(int index) const {
  const auto& d = descriptors_.at(static_cast<std::size_t>(index));
  std::string s(concept_fn_name(d.fn));
  s += '(' + slots_.slot_names()[d.a];
  if (d.b >= 0) s += ',' + slots_.slot_names()[d.b];
  return s + ')';
}

int ConceptSchema::feature_index(std::string_view name) const {
  for (int i = 0; i < size(); ++i)
    if (feature_name(i) == name) return i;
  return -1;
}

std::string ConceptSchema::to_text() const {
  std::ostringstream os;
  for (int i = 0; i < size(); ++i) os << i << ' ' << feature_name(i) << '\n';
  return os.str();
}

ConceptSchema ConceptSchema::from_text(SlotSchema slots, std::string_view text) {
  std::vector<ConceptDescriptor> ds;
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 2 || parse_long(tok[0]) != static_cast<long>(ds.size()))
      throw ContractError("malformed schema line '" + line + "'");
    ds.push_back(parse_descriptor(slots, tok[1]));
  }
  return ConceptSchema(std::move(slots), std::move(ds));
}

SlotAssignment assign_slots(std::span<const Track> tracks, const SlotSchema& schema) {
  SlotAssignment out(static_cast<std::size_t>(schema.slot_count()));
  const Track* player = nullptr;
  for (const Track& t : tracks)
    if (t.label == schema.player_class() && (!player || t.id < player->id)) player = &t;
  if (!player) return out;

  const Point2 pc = player->center();
  int slot = 0;
  for (const ClassSlots& cs : schema.classes()) {
    if (cs.cls == schema.player_class()) {
      out[static_cast<std::size_t>(slot)] = *player;
      slot += cs.max_count;
      continue;
    }
    std::vector<std::pair<double, const Track*>> members;
    for (const Track& t : tracks)
      if (t.label == cs.cls)
        members.emplace_back(std::hypot(t.center().x - pc.x, t.center().y - pc.y), &t);
    std::sort(members.begin(), members.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return a.second->id < b.second->id;
    });
    for (int i = 0; i < cs.max_count && i < static_cast<int>(members.size()); ++i)
      out[static_cast<std::size_t>(slot + i)] = *members[static_cast<std::size_t>(i)].second;
    slot += cs.max_count;
  }
  return out;
}

namespace {

double linear_trajectory(const Track& a, const Track& b) {
  if (a.history.size() < 2) return 0.0;
  const Point2 p0 = a.history[a.history.size() - 2];
  const Point2 p1 = a.history.back();
  const double dx = p1.x - p0.x, dy = p1.y - p0.y;
  const double len = std::hypot(dx, dy);
  if (len == 0.0) return 0.0;
  const Point2 q = b.center();
  return std::abs(dx * (q.y - p0.y) - dy * (q.x - p0.x)) / len;
}

double speed(const Track& a) {
  if (a.history.size() < 2) return 0.0;
  const Point2 p0 = a.history[a.history.size() - 2];
  const Point2 p1 = a.history.back();
  return std::hypot(p1.x - p0.x, p1.y - p0.y);
}

}  // namespace

ConceptVector compute_concepts(const SlotAssignment& assignment, const ConceptSchema& schema) {
  if (static_cast<int>(assignment.size()) != schema.slots().slot_count())
    throw ContractError("compute_concepts: assignment does not match the slot schema");
  ConceptVector cv;
  cv.schema_hash = schema.hash();
  cv.values.reserve(static_cast<std::size_t>(schema.size()));
  for (const ConceptDescriptor& d : schema.descriptors()) {
    const auto& a = assignment[static_cast<std::size_t>(d.a)];
    const std::optional<Track>* b = d.b >= 0 ? &assignment[static_cast<std::size_t>(d.b)] : nullptr;
    if (!a || (b && !*b)) {
      cv.values.push_back(0.0);
      continue;
    }
    double v = 0.0;
    switch (d.fn) {
      case ConceptFn::PositionX: v = a->center().x; break;
      case ConceptFn::PositionY: v = a->center().y; break;
      case ConceptFn::Speed: v = speed(*a); break;
      case ConceptFn::Distance:
        v = std::hypot(a->center().x - (*b)->center().x, a->center().y - (*b)->center().y);
        break;
      case ConceptFn::LinearTrajectory: v = linear_trajectory(*a, **b); break;
    }
    cv.values.push_back(std::isfinite(v) ? v : 0.0);
  }
  return cv;
}

ConceptSchema full_schema(GameId game) {
  SlotSchema slots = SlotSchema::for_game(game);
  const int n = slots.slot_count();
  std::vector<ConceptDescriptor> ds;
  for (int a = 0; a < n; ++a) {
    ds.push_back({ConceptFn::PositionX, a, -1});
    ds.push_back({ConceptFn::PositionY, a, -1});
  }
  for (int a = 0; a < n; ++a) ds.push_back({ConceptFn::Speed, a, -1});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b) ds.push_back({ConceptFn::Distance, a, b});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) ds.push_back({ConceptFn::LinearTrajectory, a, b});
  return ConceptSchema(std::move(slots), std::move(ds));
}

ConceptSchema pruned_schema(GameId game) {
  SlotSchema slots = SlotSchema::for_game(game);
  std::string text;
  switch (game) {
    case GameId::Paddles:
      text =
          "0 POSITION_Y(player1)\n1 POSITION_X(ball1)\n2 POSITION_Y(ball1)\n3 SPEED(ball1)\n"
          "4 DISTANCE(player1,ball1)\n5 LINEAR_TRAJECTORY(ball1,player1)\n6 POSITION_Y(enemy1)\n";
      break;
    case GameId::Brawl:
      text =
          "0 POSITION_X(player1)\n1 POSITION_Y(player1)\n2 POSITION_X(enemy1)\n"
          "3 POSITION_Y(enemy1)\n4 DISTANCE(player1,enemy1)\n5 SPEED(player1)\n6 SPEED(enemy1)\n";
      break;
    case GameId::Slalom:
      text =
          "0 POSITION_X(player1)\n1 POSITION_X(flag1)\n2 POSITION_Y(flag1)\n3 POSITION_X(flag2)\n"
          "4 DISTANCE(player1,tree1)\n";
      break;
  }
  return ConceptSchema::from_text(std::move(slots), text);
}

ConceptSchema make_schema(GameId game, SchemaKind kind) {
  return kind == SchemaKind::Full ? full_schema(game) : pruned_schema(game);
}

SchemaKind parse_schema_kind(std::string_view s) {
  if (s == "full") return SchemaKind::Full;
  if (s == "pruned") return SchemaKind::Pruned;
  throw ContractError("schema must be 'full' or 'pruned', got '" + std::string(s) + "'");
}

}  // namespace scobot
