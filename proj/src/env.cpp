#include "scobot/env.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

namespace scobot {

namespace {

constexpr double kPx = 1.0 / kFrameSize;

// ----- Paddles -------------------------------------------------------------
constexpr Rgb kPaddlesBackdrop{144, 72, 17};
constexpr Rgb kPaddlesWall{236, 236, 236};
constexpr Rgb kPaddlesPlayer{92, 186, 92};
constexpr Rgb kPaddlesEnemy{213, 130, 74};
constexpr Rgb kPaddlesBall{236, 236, 236};
constexpr int kPaddlesTopWallRow = 18;     // rows 18..20
constexpr int kPaddlesBottomWallRow = 119; // rows 119..121
constexpr double kFieldTop = (kPaddlesTopWallRow + 3) * kPx;
constexpr double kFieldBottom = kPaddlesBottomWallRow * kPx;
constexpr double kPaddleW = 4 * kPx;
constexpr double kPaddleH = 16 * kPx;
constexpr double kBallSize = 4 * kPx;
constexpr double kPlayerX = 0.90;
constexpr double kEnemyX = 0.10;
constexpr double kPlayerSpeed = 0.03;
constexpr double kEnemySpeed = 0.009;
constexpr double kServeSpeed = 0.018;
constexpr double kMaxBallVx = 0.028;
constexpr double kMaxBallVy = 0.022;
constexpr int kWinningScore = 21;

// ----- Brawl ---------------------------------------------------------------
constexpr Rgb kBrawlBackdrop{110, 156, 66};
constexpr Rgb kBrawlRope{200, 200, 200};
constexpr Rgb kBrawlPlayer{214, 214, 214};
constexpr Rgb kBrawlEnemy{0, 0, 0};
constexpr double kFighterW = 12 * kPx;
constexpr double kFighterH = 16 * kPx;
constexpr double kRingLeft = 0.06, kRingRight = 0.94;
constexpr double kRingTop = 0.16, kRingBottom = 0.845;
constexpr double kBrawlPlayerSpeed = 0.012;
constexpr double kBrawlEnemySpeed = 0.008;
constexpr double kMinGap = 4 * kPx;
constexpr double kGloveLen = 2 * kPx;
constexpr double kGloveH = 4 * kPx;
constexpr double kPunchReach = 0.05;
constexpr double kKnockback = 0.03;
constexpr int kPunchFrames = 4;
constexpr int kContactFrames = 1;  // a landed player glove touches the target this long
constexpr int kPunchCooldown = 10;
constexpr double kEnemyPunchProb = 0.26;
constexpr double kPlayerReachY = 0.9;  // vertical reach, in fighter heights
constexpr double kEnemyReachY = 0.45;
constexpr double kEnemyWanderProb = 0.25;
constexpr int kKnockout = 100;

// ----- Slalom --------------------------------------------------------------
constexpr Rgb kSnow{236, 236, 236};
constexpr double kSkierY = 0.25;
constexpr double kSkierSpeed = 0.015;
constexpr double kScrollSpeed = 0.01;
constexpr double kSpawnProb = 0.08;

// 3x5 digit glyphs, one row per 3-bit nibble (MSB = left column).
constexpr std::array<std::array<int, 5>, 10> kDigits{{{7, 5, 5, 5, 7},
                                                      {2, 6, 2, 2, 7},
                                                      {7, 1, 7, 4, 7},
                                                      {7, 1, 7, 1, 7},
                                                      {5, 5, 7, 1, 1},
                                                      {7, 4, 7, 1, 7},
                                                      {7, 4, 7, 5, 7},
                                                      {7, 1, 1, 1, 1},
                                                      {7, 5, 7, 5, 7},
                                                      {7, 5, 7, 1, 7}}};

std::uint8_t clamp_channel(int v) { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); }

Rgb jitter(Rgb base, int amount, Rng& rng) {
  auto j = [&](std::uint8_t c) {
    return clamp_channel(static_cast<int>(c) + rng.below(2 * amount + 1) - amount);
  };
  return {j(base.r), j(base.g), j(base.b)};
}

void fill_rect(Frame& f, int x0, int y0, int x1, int y1, Rgb c) {
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  x1 = std::min(x1, f.width);
  y1 = std::min(y1, f.height);
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) f.set(x, y, c);
}

void draw_number(Frame& f, int value, int center_x, int top, Rgb c) {
  const std::string text = std::to_string(value);
  constexpr int scale = 2;
  const int glyph_w = 3 * scale, spacing = 2;
  const int total = static_cast<int>(text.size()) * (glyph_w + spacing) - spacing;
  int x = center_x - total / 2;
  for (char ch : text) {
    const auto& g = kDigits[static_cast<std::size_t>(ch - '0')];
    for (int row = 0; row < 5; ++row)
      for (int col = 0; col < 3; ++col)
        if (g[static_cast<std::size_t>(row)] & (4 >> col))
          fill_rect(f, x + col * scale, top + row * scale, x + (col + 1) * scale,
                    top + (row + 1) * scale, c);
    x += glyph_w + spacing;
  }
}

void draw_entity(Frame& f, const Entity& e) {
  const PixelRect r = sprite_rect(e, f.width, f.height);
  if (e.shape == SpriteShape::Rect) {
    fill_rect(f, r.x0, r.y0, r.x1, r.y1, e.color);
    return;
  }
  // Triangle: apex at the top, full width on the bottom row.
  const int rows = r.y1 - r.y0;
  const double cx = 0.5 * (r.x0 + r.x1);
  for (int y = r.y0; y < r.y1; ++y) {
    if (y < 0 || y >= f.height) continue;
    const double t = static_cast<double>(y - r.y0 + 1) / rows;
    const double half = std::max(0.5, 0.5 * t * (r.x1 - r.x0));
    for (int x = r.x0; x < r.x1; ++x) {
      if (x < 0 || x >= f.width) continue;
      if (std::abs(x + 0.5 - cx) <= half) f.set(x, y, e.color);
    }
  }
}

Entity make_entity(std::string cls, double x, double y, double w, double h, Rgb color) {
  Entity e;
  e.cls = std::move(cls);
  e.x = x;
  e.y = y;
  e.w = w;
  e.h = h;
  e.color = color;
  return e;
}

// ----- Paddles -------------------------------------------------------------

void paddles_serve(GameState& s, Entity& ball) {
  ball.x = 0.5;
  ball.y = 0.5;
  ball.vx = s.rng.bernoulli(0.5) ? kServeSpeed : -kServeSpeed;
  ball.vy = s.rng.uniform(-0.008, 0.008);
}

void move_paddle(Entity& p, double target_dy, double speed) {
  p.y += std::clamp(target_dy, -speed, speed);
  p.y = std::clamp(p.y, kFieldTop + p.h / 2, kFieldBottom - p.h / 2);
}

void paddle_bounce(GameState& s, Entity& ball, const Entity& paddle, int direction) {
  const double offset = std::clamp((ball.y - paddle.y) / (0.5 * (paddle.h + ball.h)), -1.0, 1.0);
  const double speed = std::min(std::abs(ball.vx) * 1.05, kMaxBallVx);
  ball.vx = direction * speed;
  ball.vy = std::clamp(0.016 * offset + s.rng.uniform(-0.02, 0.02), -kMaxBallVy, kMaxBallVy);
}

StepResult paddles_step(GameState& s, Action a) {
  Entity& player = *s.find("player");
  Entity& enemy = *s.find("enemy");
  Entity& ball = *s.find("ball");

  if (a == 1) move_paddle(player, -kPlayerSpeed, kPlayerSpeed);
  if (a == 2) move_paddle(player, kPlayerSpeed, kPlayerSpeed);

  if (s.options.opponent_enabled) {
    // Full speed while the ball approaches, half speed while it recedes.
    move_paddle(enemy, ball.y - enemy.y, ball.vx < 0 ? kEnemySpeed : 0.5 * kEnemySpeed);
  }

  const double prev_left = ball.x - ball.w / 2, prev_right = ball.x + ball.w / 2;
  ball.x += ball.vx;
  ball.y += ball.vy;
  const double top = kFieldTop + ball.h / 2, bottom = kFieldBottom - ball.h / 2;
  if (ball.y < top) {
    ball.y = 2 * top - ball.y;
    ball.vy = -ball.vy;
  } else if (ball.y > bottom) {
    ball.y = 2 * bottom - ball.y;
    ball.vy = -ball.vy;
  }

  auto overlaps_y = [&](const Entity& p) {
    return std::abs(ball.y - p.y) <= 0.5 * (p.h + ball.h);
  };
  const double player_left = player.x - player.w / 2;
  const double enemy_right = enemy.x + enemy.w / 2;
  if (ball.vx > 0 && prev_right <= player_left && ball.x + ball.w / 2 >= player_left &&
      overlaps_y(player)) {
    ball.x = player_left - ball.w / 2;
    paddle_bounce(s, ball, player, -1);
  } else if (ball.vx < 0 && prev_left >= enemy_right && ball.x - ball.w / 2 <= enemy_right &&
             overlaps_y(enemy)) {
    ball.x = enemy_right + ball.w / 2;
    paddle_bounce(s, ball, enemy, +1);
  }

  StepResult r;
  if (ball.x - ball.w / 2 > 1.0) {
    ++s.score_enemy;
    r.reward = -1.0;
    paddles_serve(s, ball);
  } else if (ball.x + ball.w / 2 < 0.0) {
    ++s.score_player;
    r.reward = 1.0;
    paddles_serve(s, ball);
  }
  r.done = s.score_player >= kWinningScore || s.score_enemy >= kWinningScore;
  return r;
}

// ----- Brawl ---------------------------------------------------------------

bool too_close(const Entity& a, const Entity& b) {
  const double gap_x = std::abs(a.x - b.x) - 0.5 * (a.w + b.w);
  const double gap_y = std::abs(a.y - b.y) - 0.5 * (a.h + b.h);
  return gap_x < kMinGap && gap_y < kMinGap;
}

void clamp_to_ring(Entity& e) {
  e.x = std::clamp(e.x, kRingLeft + e.w / 2, kRingRight - e.w / 2);
  e.y = std::clamp(e.y, kRingTop + e.h / 2, kRingBottom - e.h / 2);
}

void try_move(Entity& self, const Entity& other, double dx, double dy) {
  const Entity before = self;
  self.x += dx;
  self.y += dy;
  clamp_to_ring(self);
  if (too_close(self, other)) {
    self = before;
  }
}

bool in_reach(const Entity& puncher, const Entity& target, double reach_y) {
  const double dir = puncher.facing;
  const double front = puncher.x + dir * puncher.w / 2;
  const double near_edge = target.x - dir * target.w / 2;
  const double gap = dir * (near_edge - front);
  return gap >= 0.0 && gap <= kPunchReach && std::abs(puncher.y - target.y) < reach_y * puncher.h;
}

// Starts a punch if possible; returns true when it lands.
bool punch(Entity& puncher, Entity& target, double reach_y) {
  if (puncher.cooldown > 0) return false;
  puncher.punch_timer = kPunchFrames;
  puncher.cooldown = kPunchCooldown;
  puncher.landed = in_reach(puncher, target, reach_y);
  if (!puncher.landed) return false;
  const Entity before = target;
  target.x += puncher.facing * kKnockback;
  clamp_to_ring(target);
  if (too_close(target, puncher)) target = before;
  return true;
}

Action brawl_enemy_policy(GameState& s, const Entity& enemy, const Entity& player) {
  if (s.rng.bernoulli(kEnemyWanderProb)) return s.rng.below(5);
  if (enemy.cooldown == 0 && in_reach(enemy, player, kEnemyReachY) && s.rng.bernoulli(kEnemyPunchProb))
    return 5;
  const double side = enemy.x >= player.x ? 1.0 : -1.0;
  const double tx = player.x + side * (0.5 * (enemy.w + player.w) + kMinGap + 0.01);
  const double dx = tx - enemy.x, dy = player.y - enemy.y;
  if (std::abs(dx) >= std::abs(dy) && std::abs(dx) > kBrawlEnemySpeed) return dx < 0 ? 3 : 4;
  if (std::abs(dy) > kBrawlEnemySpeed) return dy < 0 ? 1 : 2;
  return 0;
}

void apply_move(Entity& self, const Entity& other, Action a, double speed) {
  switch (a) {
    case 1: try_move(self, other, 0, -speed); break;
    case 2: try_move(self, other, 0, speed); break;
    case 3: try_move(self, other, -speed, 0); break;
    case 4: try_move(self, other, speed, 0); break;
    default: break;
  }
}

StepResult brawl_step(GameState& s, Action a) {
  Entity& player = *s.find("player");
  Entity& enemy = *s.find("enemy");
  for (Entity* e : {&player, &enemy}) {
    if (e->punch_timer > 0) --e->punch_timer;
    if (e->cooldown > 0) --e->cooldown;
  }

  StepResult r;
  apply_move(player, enemy, a, kBrawlPlayerSpeed);
  player.facing = enemy.x >= player.x ? 1 : -1;
  enemy.facing = -player.facing;
  if (a == 5 && punch(player, enemy, kPlayerReachY)) {
    ++s.score_player;
    r.reward += 1.0;
  }

  if (s.options.opponent_enabled) {
    const Action ea = brawl_enemy_policy(s, enemy, player);
    apply_move(enemy, player, ea, kBrawlEnemySpeed);
    enemy.facing = player.x >= enemy.x ? 1 : -1;
    player.facing = -enemy.facing;
    if (ea == 5 && punch(enemy, player, kEnemyReachY)) {
      ++s.score_enemy;
      r.reward -= 1.0;
    }
  }
  r.done = s.score_player >= kKnockout || s.score_enemy >= kKnockout;
  return r;
}

// ----- Slalom --------------------------------------------------------------

void slalom_spawn(GameState& s, double y) {
  const double kind = s.rng.uniform();
  if (kind < 0.4) {
    Entity t = make_entity("tree", s.rng.uniform(0.05, 0.95), y, 10 * kPx, 14 * kPx,
                           jitter({50, 130, 50}, 40, s.rng));
    t.shape = SpriteShape::Triangle;
    t.y = y + t.h / 2;
    t.vy = -kScrollSpeed;
    s.entities.push_back(t);
  } else if (kind < 0.7) {
    const double left = s.rng.uniform(0.05, 0.75);
    const Rgb c = jitter({60, 60, 210}, 40, s.rng);
    for (double x : {left, left + 0.2}) {
      Entity f = make_entity("flag", x, y, 3 * kPx, 9 * kPx, c);
      f.y = y + f.h / 2;
      f.vy = -kScrollSpeed;
      s.entities.push_back(f);
    }
  } else {
    Entity m = make_entity("mogul", s.rng.uniform(0.05, 0.95), y, 8 * kPx, 4 * kPx,
                           jitter({170, 170, 190}, 25, s.rng));
    m.y = y + m.h / 2;
    m.vy = -kScrollSpeed;
    s.entities.push_back(m);
  }
}

StepResult slalom_step(GameState& s, Action a) {
  Entity& skier = *s.find("player");
  if (a == 1) skier.x -= kSkierSpeed;
  if (a == 2) skier.x += kSkierSpeed;
  skier.x = std::clamp(skier.x, skier.w / 2, 1.0 - skier.w / 2);
  for (Entity& e : s.entities) {
    if (e.cls == "player") continue;
    e.y += e.vy;
  }
  std::erase_if(s.entities, [](const Entity& e) { return e.cls != "player" && e.y + e.h / 2 < 0; });
  if (s.rng.bernoulli(kSpawnProb)) slalom_spawn(s, 1.0);
  return {};
}

long default_max_steps(GameId g) {
  switch (g) {
    case GameId::Paddles: return 20000;
    case GameId::Brawl: return 1000;
    case GameId::Slalom: return 1000;
  }
  return 1000;
}

}  // namespace

std::string_view game_name(GameId g) {
  switch (g) {
    case GameId::Paddles: return "Paddles";
    case GameId::Brawl: return "Brawl";
    case GameId::Slalom: return "Slalom";
  }
  return "?";
}

GameId parse_game(std::string_view name) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };
  for (GameId g : {GameId::Paddles, GameId::Brawl, GameId::Slalom})
    if (lower(game_name(g)) == lower(name)) return g;
  throw ContractError("unknown game '" + std::string(name) + "'");
}

const std::vector<std::string>& action_names(GameId g) {
  static const std::vector<std::string> paddles{"NOOP", "UP", "DOWN"};
  static const std::vector<std::string> brawl{"NOOP", "UP", "DOWN", "LEFT", "RIGHT", "PUNCH"};
  static const std::vector<std::string> slalom{"NOOP", "LEFT", "RIGHT"};
  switch (g) {
    case GameId::Paddles: return paddles;
    case GameId::Brawl: return brawl;
    case GameId::Slalom: return slalom;
  }
  return paddles;
}

Action parse_action(GameId g, std::string_view name) {
  const auto& names = action_names(g);
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<Action>(i);
  throw ContractError("unknown action '" + std::string(name) + "' for " +
                      std::string(game_name(g)));
}

const std::vector<std::string>& object_classes(GameId g) {
  static const std::vector<std::string> paddles{"player", "enemy", "ball"};
  static const std::vector<std::string> brawl{"player", "enemy"};
  static const std::vector<std::string> slalom{"player", "tree", "flag", "mogul"};
  switch (g) {
    case GameId::Paddles: return paddles;
    case GameId::Brawl: return brawl;
    case GameId::Slalom: return slalom;
  }
  return paddles;
}

Entity* GameState::find(std::string_view cls) {
  for (auto& e : entities)
    if (e.cls == cls) return &e;
  return nullptr;
}

const Entity* GameState::find(std::string_view cls) const {
  for (const auto& e : entities)
    if (e.cls == cls) return &e;
  return nullptr;
}

GameState reset(GameId game, std::uint64_t seed, EnvOptions options) {
  GameState s;
  s.game = game;
  s.options = options;
  if (s.options.max_steps <= 0) s.options.max_steps = default_max_steps(game);
  s.rng = Rng(seed);
  switch (game) {
    case GameId::Paddles: {
      const double mid = 0.5 * (kFieldTop + kFieldBottom);
      s.entities.push_back(make_entity("player", kPlayerX, mid, kPaddleW, kPaddleH, kPaddlesPlayer));
      s.entities.push_back(make_entity("enemy", kEnemyX, mid, kPaddleW, kPaddleH, kPaddlesEnemy));
      s.entities.push_back(make_entity("ball", 0.5, 0.5, kBallSize, kBallSize, kPaddlesBall));
      paddles_serve(s, s.entities.back());
      break;
    }
    case GameId::Brawl: {
      Entity p = make_entity("player", 0.3, 0.5, kFighterW, kFighterH, kBrawlPlayer);
      Entity e = make_entity("enemy", 0.7, s.rng.uniform(0.3, 0.7), kFighterW, kFighterH,
                             kBrawlEnemy);
      p.facing = 1;
      e.facing = -1;
      s.entities.push_back(p);
      s.entities.push_back(e);
      break;
    }
    case GameId::Slalom: {
      Entity skier = make_entity("player", 0.5, kSkierY, 6 * kPx, 10 * kPx,
                                 jitter({214, 92, 66}, 16, s.rng));
      s.entities.push_back(skier);
      const int count = 4 + s.rng.below(4);
      for (int i = 0; i < count; ++i) slalom_spawn(s, s.rng.uniform(0.35, 0.95));
      break;
    }
  }
  return s;
}

StepResult step(GameState& state, Action action) {
  if (state.done) throw ContractError("step: episode already finished");
  if (action < 0 || action >= action_count(state.game))
    throw ContractError("step: action id out of range");
  StepResult r;
  switch (state.game) {
    case GameId::Paddles: r = paddles_step(state, action); break;
    case GameId::Brawl: r = brawl_step(state, action); break;
    case GameId::Slalom: r = slalom_step(state, action); break;
  }
  ++state.step;
  if (state.step >= state.options.max_steps) r.done = true;
  state.done = r.done;
  state.episode_reward += r.reward;
  return r;
}

PixelRect sprite_rect(const Entity& e, int width, int height) {
  const int pw = std::max(1, static_cast<int>(std::lround(e.w * width)));
  const int ph = std::max(1, static_cast<int>(std::lround(e.h * height)));
  const int x0 = static_cast<int>(std::lround((e.x - e.w / 2) * width));
  const int y0 = static_cast<int>(std::lround((e.y - e.h / 2) * height));
  return {x0, y0, x0 + pw, y0 + ph};
}

Frame render_backdrop(GameId game) {
  switch (game) {
    case GameId::Paddles: {
      Frame f(kFrameSize, kFrameSize, kPaddlesBackdrop);
      fill_rect(f, 0, kPaddlesTopWallRow, kFrameSize, kPaddlesTopWallRow + 3, kPaddlesWall);
      fill_rect(f, 0, kPaddlesBottomWallRow, kFrameSize, kPaddlesBottomWallRow + 3, kPaddlesWall);
      return f;
    }
    case GameId::Brawl: {
      Frame f(kFrameSize, kFrameSize, kBrawlBackdrop);
      const int top = static_cast<int>(kRingTop * kFrameSize) - 2;
      const int bottom = static_cast<int>(kRingBottom * kFrameSize) + 2;
      const int left = static_cast<int>(kRingLeft * kFrameSize) - 2;
      const int right = static_cast<int>(kRingRight * kFrameSize) + 2;
      fill_rect(f, left, top, right, top + 1, kBrawlRope);
      fill_rect(f, left, bottom, right, bottom + 1, kBrawlRope);
      fill_rect(f, left, top, left + 1, bottom + 1, kBrawlRope);
      fill_rect(f, right - 1, top, right, bottom + 1, kBrawlRope);
      return f;
    }
    case GameId::Slalom: return Frame(kFrameSize, kFrameSize, kSnow);
  }
  return Frame(kFrameSize, kFrameSize);
}

Frame render(const GameState& state) {
  Frame f = render_backdrop(state.game);
  f.timestep = state.step;
  switch (state.game) {
    case GameId::Paddles:
      draw_number(f, state.score_enemy, 32, 5, kPaddlesEnemy);
      draw_number(f, state.score_player, 96, 5, kPaddlesPlayer);
      break;
    case GameId::Brawl:
      draw_number(f, state.score_player, 32, 4, kBrawlPlayer);
      draw_number(f, state.score_enemy, 96, 4, kBrawlEnemy);
      break;
    case GameId::Slalom: break;
  }
  for (const Entity& e : state.entities) {
    draw_entity(f, e);
    if (state.game == GameId::Brawl && e.punch_timer > 0) {
      const PixelRect r = sprite_rect(e, f.width, f.height);
      const int glove = static_cast<int>(std::lround(kGloveLen * f.width));
      const int gh = static_cast<int>(std::lround(kGloveH * f.height));
      const int gy0 = (r.y0 + r.y1) / 2 - gh / 2;
      int x0 = r.x1, x1 = r.x1 + glove;
      if (e.facing < 0) x0 = r.x0 - glove, x1 = r.x0;
      if (e.cls == "player" && e.landed && e.punch_timer > kPunchFrames - kContactFrames) {
        for (const Entity& t : state.entities) {
          if (&t == &e) continue;
          const PixelRect tr = sprite_rect(t, f.width, f.height);
          if (e.facing > 0)
            x1 = std::max(x1, tr.x0);
          else
            x0 = std::min(x0, tr.x1);
        }
      }
      fill_rect(f, x0, gy0, x1, gy0 + gh, e.color);
    }
  }
  return f;
}

std::vector<GroundTruthObject> ground_truth(const GameState& state) {
  std::vector<GroundTruthObject> out;
  for (const Entity& e : state.entities) {
    const PixelRect r = sprite_rect(e, kFrameSize, kFrameSize);
    const bool visible = r.x1 > 0 && r.y1 > 0 && r.x0 < kFrameSize && r.y0 < kFrameSize;
    if (!visible) continue;
    GroundTruthObject g;
    g.cls = e.cls;
    g.box.x_min = std::clamp(e.x - e.w / 2, 0.0, 1.0);
    g.box.x_max = std::clamp(e.x + e.w / 2, 0.0, 1.0);
    g.box.y_min = std::clamp(e.y - e.h / 2, 0.0, 1.0);
    g.box.y_max = std::clamp(e.y + e.h / 2, 0.0, 1.0);
    if (!g.box.valid()) continue;
    out.push_back(std::move(g));
  }
  return out;
}

Action paddles_perfect_tracker(const GameState& state) {
  const Entity* player = state.find("player");
  const Entity* ball = state.find("ball");
  if (!player || !ball) return 0;
  const double dy = ball->y - player->y;
  if (dy < -0.015) return 1;
  if (dy > 0.015) return 2;
  return 0;
}

double max_episode_reward(GameId game) {
  switch (game) {
    case GameId::Paddles: return kWinningScore;
    case GameId::Brawl: return kKnockout;
    case GameId::Slalom: return 0.0;
  }
  return 0.0;
}

}  // namespace scobot
