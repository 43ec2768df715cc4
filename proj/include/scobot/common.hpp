#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scobot {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Precondition or contract violated by the caller.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A file is missing, truncated or fails its checksum. The message names the file.
class CorruptFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A loss or gradient became non-finite.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, int minibatch = -1)
      : std::runtime_error(what), minibatch_(minibatch) {}
  int minibatch() const { return minibatch_; }

 private:
  int minibatch_;
};

// ---------------------------------------------------------------------------
// Random numbers
// ---------------------------------------------------------------------------

// splitmix64-seeded xoshiro256**. Distributions are written out by hand so
// that sequences are identical across standard library implementations.
class Rng {
 public:
  Rng() : Rng(0) {}
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  double uniform();                        // [0, 1)
  double uniform(double lo, double hi);    // [lo, hi)
  int below(int n);                        // [0, n)
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  bool operator==(const Rng&) const = default;

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Derives an independent stream seed from a base seed and a stream index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// ---------------------------------------------------------------------------
// Geometry and images
// ---------------------------------------------------------------------------

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

/// Axis-aligned box in normalized screen coordinates.
struct BBox {
  double x_min = 0, y_min = 0, x_max = 0, y_max = 0;

  double cx() const { return 0.5 * (x_min + x_max); }
  double cy() const { return 0.5 * (y_min + y_max); }
  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  bool valid() const;

  bool operator==(const BBox&) const = default;
};

struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel
  long timestep = 0;

  Frame() = default;
  Frame(int w, int h, Rgb fill = {});

  Rgb at(int x, int y) const {
    const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
  }
  void set(int x, int y, Rgb c) {
    const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
    rgb[i] = c.r;
    rgb[i + 1] = c.g;
    rgb[i + 2] = c.b;
  }
  bool operator==(const Frame&) const = default;
};

/// Binary image; 1 = foreground.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  Mask() = default;
  Mask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}
  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
  bool operator==(const Mask&) const = default;
};

// ---------------------------------------------------------------------------
// Text helpers
// ---------------------------------------------------------------------------

/// Fixed notation with at least `min_decimals` digits, extended until the
/// text parses back to exactly `v`.
std::string format_exact(double v, int min_decimals = 4);

/// Strict double parse; throws ContractError on trailing junk.
double parse_double(std::string_view s);
long parse_long(std::string_view s);

std::vector<std::string> split_ws(std::string_view line);
std::string_view trim(std::string_view s);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL);
inline std::uint64_t fnv1a(std::string_view s) { return fnv1a(s.data(), s.size()); }
std::string hex64(std::uint64_t v);

}  // namespace scobot
