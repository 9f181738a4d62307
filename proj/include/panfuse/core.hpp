#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace panfuse {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dimension or band-count mismatch between operands.
struct ShapeError : Error {
  using Error::Error;
};

/// An argument value outside its documented domain.
struct ParameterError : Error {
  using Error::Error;
};

/// Non-finite samples or degenerate linear algebra.
struct NumericError : Error {
  using Error::Error;
};

/// Malformed or truncated file content.
struct FormatError : Error {
  using Error::Error;
};

/// A single-channel 2-D grid of real-valued samples, row-major.
///
/// Bands are immutable after construction; every public operation in the
/// library returns a new band and guarantees all samples stay finite.
template <typename T = double>
class BasicBand {
  static_assert(std::is_floating_point_v<T>);

 public:
  using value_type = T;

  BasicBand(std::size_t width, std::size_t height, T fill = T{})
      : width_(width), height_(height), samples_(checked_size(width, height), fill) {
    if (!std::isfinite(fill)) throw NumericError("band fill value is not finite");
  }

  BasicBand(std::size_t width, std::size_t height, std::vector<T> samples)
      : width_(width), height_(height), samples_(std::move(samples)) {
    if (samples_.size() != checked_size(width, height))
      throw ShapeError("sample count " + std::to_string(samples_.size()) +
                       " does not match " + std::to_string(width) + "x" +
                       std::to_string(height));
    for (std::size_t i = 0; i < samples_.size(); ++i)
      if (!std::isfinite(samples_[i]))
        throw NumericError("non-finite sample at index " + std::to_string(i));
  }

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t pixel_count() const { return samples_.size(); }

  T operator()(std::size_t row, std::size_t col) const {
    return samples_[row * width_ + col];
  }

  T at(std::size_t row, std::size_t col) const {
    if (row >= height_ || col >= width_)
      throw ParameterError("pixel (" + std::to_string(row) + "," + std::to_string(col) +
                           ") outside " + std::to_string(width_) + "x" + std::to_string(height_));
    return (*this)(row, col);
  }

  const std::vector<T>& samples() const { return samples_; }

  bool same_shape(const BasicBand& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

 private:
  static std::size_t checked_size(std::size_t width, std::size_t height) {
    if (width < 1 || height < 1) throw ShapeError("band dimensions must be >= 1");
    if (height > static_cast<std::size_t>(-1) / width)
      throw ShapeError("band dimensions overflow");
    return width * height;
  }

  std::size_t width_ = 0, height_ = 0;
  std::vector<T> samples_;
};

using Band = BasicBand<double>;

namespace detail {

template <typename T>
inline void require_same_shape(const BasicBand<T>& a, const BasicBand<T>& b,
                               const char* what) {
  if (!a.same_shape(b))
    throw ShapeError(std::string(what) + ": " + std::to_string(a.width()) + "x" +
                     std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                     "x" + std::to_string(b.height()));
}

}  // namespace detail

/// Elementwise unary application; a non-finite result is a NumericError.
template <typename T, typename F>
BasicBand<T> map1(const BasicBand<T>& a, F&& f) {
  std::vector<T> out(a.pixel_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(a.samples()[i]);
  return BasicBand<T>(a.width(), a.height(), std::move(out));
}

/// Elementwise binary application over same-shaped bands.
template <typename T, typename F>
BasicBand<T> map2(const BasicBand<T>& a, const BasicBand<T>& b, F&& f) {
  detail::require_same_shape(a, b, "map2 operands");
  std::vector<T> out(a.pixel_count());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = f(a.samples()[i], b.samples()[i]);
  return BasicBand<T>(a.width(), a.height(), std::move(out));
}

template <typename T, typename A, typename F>
A fold(const BasicBand<T>& a, A init, F&& f) {
  A acc = init;
  for (const T& v : a.samples()) acc = f(acc, v);
  return acc;
}

template <typename T>
BasicBand<T> add(const BasicBand<T>& a, const BasicBand<T>& b) {
  return map2(a, b, [](T x, T y) { return x + y; });
}

template <typename T>
BasicBand<T> sub(const BasicBand<T>& a, const BasicBand<T>& b) {
  return map2(a, b, [](T x, T y) { return x - y; });
}

template <typename T>
BasicBand<T> mul(const BasicBand<T>& a, const BasicBand<T>& b) {
  return map2(a, b, [](T x, T y) { return x * y; });
}

template <typename T>
BasicBand<T> div(const BasicBand<T>& a, const BasicBand<T>& b) {
  return map2(a, b, [](T x, T y) { return x / y; });
}

template <typename T>
BasicBand<T> scale(const BasicBand<T>& a, T factor) {
  return map1(a, [factor](T x) { return x * factor; });
}

template <typename T>
T band_min(const BasicBand<T>& a) {
  return fold(a, a.samples()[0], [](T acc, T v) { return v < acc ? v : acc; });
}

template <typename T>
T band_max(const BasicBand<T>& a) {
  return fold(a, a.samples()[0], [](T acc, T v) { return v > acc ? v : acc; });
}

template <typename T>
T band_mean(const BasicBand<T>& a) {
  T sum{};
  for (const T& v : a.samples()) sum += v;
  return sum / static_cast<T>(a.pixel_count());
}

/// Population variance (divide by n).
template <typename T>
T band_variance(const BasicBand<T>& a) {
  const T m = band_mean(a);
  T sum{};
  for (const T& v : a.samples()) sum += (v - m) * (v - m);
  return sum / static_cast<T>(a.pixel_count());
}

/// An ordered list of co-registered equally sized bands.
template <typename T = double>
class BasicBandStack {
 public:
  explicit BasicBandStack(std::vector<BasicBand<T>> bands,
                          std::vector<std::string> names = {})
      : bands_(std::move(bands)), names_(std::move(names)) {
    if (bands_.empty()) throw ParameterError("band stack needs at least one band");
    for (std::size_t i = 1; i < bands_.size(); ++i)
      detail::require_same_shape(bands_[0], bands_[i], "stack bands");
    if (names_.empty()) {
      names_.reserve(bands_.size());
      for (std::size_t i = 0; i < bands_.size(); ++i)
        names_.push_back("band" + std::to_string(i + 1));
    } else if (names_.size() != bands_.size()) {
      throw ParameterError("band name count does not match band count");
    }
  }

  std::size_t band_count() const { return bands_.size(); }
  std::size_t width() const { return bands_[0].width(); }
  std::size_t height() const { return bands_[0].height(); }

  const BasicBand<T>& band(std::size_t i) const { return bands_.at(i); }
  const std::string& name(std::size_t i) const { return names_.at(i); }

  const std::vector<BasicBand<T>>& bands() const { return bands_; }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<BasicBand<T>> bands_;
  std::vector<std::string> names_;
};

using BandStack = BasicBandStack<double>;

/// Pixelwise mean across all bands of a stack.
template <typename T>
BasicBand<T> pixelwise_mean(const BasicBandStack<T>& stack) {
  std::vector<T> out(stack.band(0).pixel_count(), T{});
  for (std::size_t b = 0; b < stack.band_count(); ++b) {
    const auto& s = stack.band(b).samples();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += s[i];
  }
  const T inv = T(1) / static_cast<T>(stack.band_count());
  for (T& v : out) v *= inv;
  return BasicBand<T>(stack.width(), stack.height(), std::move(out));
}

}  // namespace panfuse
