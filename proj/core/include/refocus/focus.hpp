#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace refocus {

/// Shannon entropy -sum p ln p (natural log, 0 ln 0 = 0). Throws
/// InvalidDistribution for a negative entry or a sum off by more than 1e-6.
[[nodiscard]] double entropy(std::span<const double> p);

/// H(p) / ln N with N = p.size(). Requires N >= 2 (InvalidArgument otherwise).
[[nodiscard]] double normalized_entropy(std::span<const double> p);

/// 1 - normalized entropy, in [0, 1]. A single-element map has focus 1.
[[nodiscard]] double focus(std::span<const double> p);

struct FocusStats {
  double mu = 0.0;
  double sigma = 0.0;  // population standard deviation
  double alpha = 1.0;
  double beta = 1.0;

  [[nodiscard]] double over_edge() const noexcept { return mu + alpha * sigma; }
  [[nodiscard]] double under_edge() const noexcept { return mu - beta * sigma; }
};

[[nodiscard]] FocusStats focus_stats(std::span<const double> values, double alpha = 1.0,
                                     double beta = 1.0);

enum class FocusBand { under, in, over };

[[nodiscard]] std::string_view band_name(FocusBand band) noexcept;

/// over iff f >= mu + alpha*sigma, under iff f <= mu - beta*sigma.
[[nodiscard]] FocusBand classify_focus(double f, const FocusStats& stats);

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  std::size_t count = 0;
};

/// `bins` uniform bins over [0, 1]; 1.0 falls into the last bin. Values
/// outside [0, 1] are clamped.
[[nodiscard]] std::vector<HistogramBin> focus_histogram(std::span<const double> values,
                                                        std::size_t bins = 50);

/// Bin index of a focus value under the focus_histogram layout.
[[nodiscard]] std::size_t focus_bin(double f, std::size_t bins) noexcept;

}  // namespace refocus
