#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace tapered {

using PixelArray = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// 8-bit grayscale image, row-major (rows = height).
struct Frame {
  PixelArray pixels;

  Frame() = default;
  Frame(int width, int height) : pixels(PixelArray::Zero(height, width)) {}
  explicit Frame(PixelArray p) : pixels(std::move(p)) {}

  int width() const noexcept { return static_cast<int>(pixels.cols()); }
  int height() const noexcept { return static_cast<int>(pixels.rows()); }
  std::uint8_t at(int x, int y) const { return pixels(y, x); }
  std::uint8_t& at(int x, int y) { return pixels(y, x); }

  std::span<const std::uint8_t> bytes() const noexcept
  {
    return {pixels.data(), static_cast<std::size_t>(pixels.size())};
  }

  friend bool operator==(const Frame& a, const Frame& b)
  {
    return a.pixels.rows() == b.pixels.rows() && a.pixels.cols() == b.pixels.cols() &&
           (a.pixels == b.pixels).all();
  }
};

class PgmError : public std::runtime_error {
 public:
  enum class Kind { BadMagic, BadHeader, BadMaxval, Truncated };

  PgmError(Kind kind, std::size_t offset, const std::string& what)
      : std::runtime_error(what + " at byte offset " + std::to_string(offset)), kind_(kind), offset_(offset)
  {
  }

  Kind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

/// Binary PGM ("P5", maxval 255). Trailing bytes after the first image are ignored.
Frame load_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> save_pgm(const Frame& frame);

Frame read_pgm_file(const std::filesystem::path& path);
void write_pgm_file(const std::filesystem::path& path, const Frame& frame);

/// 64-bit FNV-1a over the dimensions and pixel bytes.
std::uint64_t frame_checksum(const Frame& frame) noexcept;

/// Parameters of the synthetic rotating, textured sphere.
struct SphereSceneParams {
  int width = 200;
  int height = 200;
  double radius = 80.0;
  double frequency = 12.0;  ///< texture cycles per 2*pi of longitude / latitude
  double angle = 0.02;      ///< rotation per frame about the vertical axis, radians
  int frames = 2;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument on a violated invariant.
  void validate() const;
};

std::vector<Frame> gen_sphere(const SphereSceneParams& params);

}  // namespace tapered
