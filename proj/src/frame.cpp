#include "tapered/frame.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>

namespace tapered {

namespace {

class PgmReader {
 public:
  explicit PgmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void expect_magic()
  {
    if (bytes_.size() < 2 || bytes_[0] != 'P' || bytes_[1] != '5') {
      throw PgmError(PgmError::Kind::BadMagic, 0, "unsupported magic (expected P5)");
    }
    pos_ = 2;
  }

  int read_number(const char* what)
  {
    skip_space_and_comments();
    const std::size_t start = pos_;
    last_start_ = start;
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000) throw PgmError(PgmError::Kind::BadHeader, start, std::string(what) + " too large");
      ++pos_;
    }
    if (pos_ == start) {
      if (pos_ >= bytes_.size()) throw PgmError(PgmError::Kind::Truncated, pos_, std::string("missing ") + what);
      throw PgmError(PgmError::Kind::BadHeader, pos_, std::string("expected ") + what);
    }
    return static_cast<int>(value);
  }

  void single_whitespace()
  {
    if (pos_ >= bytes_.size()) throw PgmError(PgmError::Kind::Truncated, pos_, "header ends before raster");
    if (!std::isspace(bytes_[pos_])) {
      throw PgmError(PgmError::Kind::BadHeader, pos_, "expected whitespace after maxval");
    }
    ++pos_;
  }

  std::size_t pos() const noexcept { return pos_; }
  /// Offset of the first digit of the last number read.
  std::size_t last_start() const noexcept { return last_start_; }

 private:
  void skip_space_and_comments()
  {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::size_t last_start_ = 0;
};

}  // namespace

Frame load_pgm(std::span<const std::uint8_t> bytes)
{
  PgmReader reader(bytes);
  reader.expect_magic();
  const int width = reader.read_number("width");
  const std::size_t width_offset = reader.last_start();
  const int height = reader.read_number("height");
  const int maxval = reader.read_number("maxval");
  const std::size_t maxval_offset = reader.last_start();
  if (maxval != 255) {
    throw PgmError(PgmError::Kind::BadMaxval, maxval_offset, "maxval " + std::to_string(maxval) + " is not 255");
  }
  if (width < 1 || height < 1) throw PgmError(PgmError::Kind::BadHeader, width_offset, "empty image");
  reader.single_whitespace();

  const std::size_t start = reader.pos();
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() - start < count) {
    throw PgmError(PgmError::Kind::Truncated, bytes.size(),
                   "raster truncated (" + std::to_string(bytes.size() - start) + " of " + std::to_string(count) +
                       " bytes)");
  }
  Frame frame(width, height);
  std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(start), count, frame.pixels.data());
  return frame;
}

std::vector<std::uint8_t> save_pgm(const Frame& frame)
{
  const std::string header =
      "P5\n" + std::to_string(frame.width()) + " " + std::to_string(frame.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const auto raster = frame.bytes();
  out.insert(out.end(), raster.begin(), raster.end());
  return out;
}

Frame read_pgm_file(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return load_pgm(bytes);
}

void write_pgm_file(const std::filesystem::path& path, const Frame& frame)
{
  const auto bytes = save_pgm(frame);
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::uint64_t frame_checksum(const Frame& frame) noexcept
{
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::uint8_t b) {
    h ^= b;
    h *= 0x100000001b3ull;
  };
  for (int shift = 0; shift < 32; shift += 8) mix(static_cast<std::uint8_t>(frame.width() >> shift));
  for (int shift = 0; shift < 32; shift += 8) mix(static_cast<std::uint8_t>(frame.height() >> shift));
  for (std::uint8_t b : frame.bytes()) mix(b);
  return h;
}

void SphereSceneParams::validate() const
{
  if (width < 3 || height < 3) throw std::invalid_argument("image must be at least 3x3");
  if (!(radius > 0.0) || radius >= std::min(width, height) / 2.0) {
    throw std::invalid_argument("sphere radius must be positive and below half the smaller image side");
  }
  if (!(frequency > 0.0)) throw std::invalid_argument("texture frequency must be positive");
  if (!(std::fabs(angle) <= 0.05)) throw std::invalid_argument("rotation angle must be at most 0.05 rad");
  if (frames < 1) throw std::invalid_argument("frame count must be at least 1");
}

std::vector<Frame> gen_sphere(const SphereSceneParams& params)
{
  params.validate();
  constexpr double two_pi = 2.0 * std::numbers::pi;

  // Raw engine output only: distribution objects are not portable across libraries.
  std::mt19937_64 rng(params.seed);
  const double phase_lon = two_pi * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  const double phase_lat = two_pi * static_cast<double>(rng() >> 11) * 0x1.0p-53;

  const double lx = -0.3, ly = 0.4, lz = 0.866;
  const double lnorm = std::sqrt(lx * lx + ly * ly + lz * lz);

  const double cx = (params.width - 1) / 2.0;
  const double cy = (params.height - 1) / 2.0;

  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(params.frames));
  for (int t = 0; t < params.frames; ++t) {
    const double rotation = t * params.angle;
    Frame frame(params.width, params.height);
    for (int y = 0; y < params.height; ++y) {
      for (int x = 0; x < params.width; ++x) {
        const double sx = (x - cx) / params.radius;
        const double sy = (cy - y) / params.radius;
        const double d2 = sx * sx + sy * sy;
        if (d2 >= 1.0) continue;
        const double sz = std::sqrt(1.0 - d2);
        const double longitude = std::atan2(sx, sz) - rotation;
        const double latitude = std::asin(sy);
        const double texture = 0.5 + 0.25 * std::sin(params.frequency * longitude + phase_lon) +
                               0.25 * std::sin(params.frequency * latitude + phase_lat);
        const double lambert = std::max(0.0, (sx * lx + sy * ly + sz * lz) / lnorm);
        const double shade = 0.25 + 0.75 * lambert;
        const double value = std::round(255.0 * shade * texture);
        frame.at(x, y) = static_cast<std::uint8_t>(std::clamp(value, 0.0, 255.0));
      }
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

}  // namespace tapered
