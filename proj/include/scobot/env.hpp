#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "scobot/common.hpp"

namespace scobot {

enum class GameId { Paddles, Brawl, Slalom };

std::string_view game_name(GameId g);
GameId parse_game(std::string_view name);  // case-insensitive

/// Native frame size for every game.
inline constexpr int kFrameSize = 128;

/// Action ids per game. Paddles: NOOP UP DOWN. Brawl: NOOP UP DOWN LEFT RIGHT
/// PUNCH. Slalom: NOOP LEFT RIGHT.
using Action = int;

const std::vector<std::string>& action_names(GameId g);
inline int action_count(GameId g) { return static_cast<int>(action_names(g).size()); }
Action parse_action(GameId g, std::string_view name);

/// Object class vocabulary; the first entry is the agent-controlled class.
const std::vector<std::string>& object_classes(GameId g);

enum class SpriteShape { Rect, Triangle };

struct Entity {
  std::string cls;
  double x = 0, y = 0;    // center, normalized
  double vx = 0, vy = 0;  // per step
  double w = 0, h = 0;    // size, normalized
  Rgb color;
  SpriteShape shape = SpriteShape::Rect;
  int punch_timer = 0;  // Brawl: frames the glove stays extended
  int cooldown = 0;     // Brawl: frames until the next punch may start
  int facing = 1;       // Brawl: +1 faces right, -1 faces left
  bool landed = false;  // Brawl: the current punch connected

  bool operator==(const Entity&) const = default;
};

struct EnvOptions {
  bool opponent_enabled = true;  // scripted enemy acts
  long max_steps = 0;            // 0 = game default

  bool operator==(const EnvOptions&) const = default;
};

struct GameState {
  GameId game = GameId::Paddles;
  EnvOptions options;
  std::vector<Entity> entities;
  int score_player = 0;
  int score_enemy = 0;
  double episode_reward = 0.0;
  long step = 0;
  bool done = false;
  Rng rng;

  bool operator==(const GameState&) const = default;

  Entity* find(std::string_view cls);
  const Entity* find(std::string_view cls) const;
};

struct StepResult {
  double reward = 0.0;
  bool done = false;
};

struct GroundTruthObject {
  std::string cls;
  BBox box;

  double cx() const { return box.cx(); }
  double cy() const { return box.cy(); }
  bool operator==(const GroundTruthObject&) const = default;
};

GameState reset(GameId game, std::uint64_t seed, EnvOptions options = {});

/// Advances one tick in place. Throws ContractError on a finished episode.
StepResult step(GameState& state, Action action);

Frame render(const GameState& state);

/// Static backdrop without entities or score digits.
Frame render_backdrop(GameId game);

/// One annotation per visible moving entity, box clipped to the screen.
std::vector<GroundTruthObject> ground_truth(const GameState& state);

/// Pixel rectangle [x0, x1) x [y0, y1) an entity occupies before clipping.
struct PixelRect {
  int x0, y0, x1, y1;
};
PixelRect sprite_rect(const Entity& e, int width, int height);

/// Scripted reference policies driven by the true game state.
Action paddles_perfect_tracker(const GameState& state);

/// Episode-level reward bounds (Slalom carries no reward).
double max_episode_reward(GameId game);

}  // namespace scobot
