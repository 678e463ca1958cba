#include "refocus/focus.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "refocus/error.hpp"

namespace refocus {

namespace {

// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace

double entropy(std::span<const double> p) {
  if (p.empty()) throw InvalidDistribution("empty distribution");
  CompensatedSum mass, h;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidDistribution("distribution has a negative or non-finite entry");
    }
    mass.add(v);
    if (v > 0.0) h.add(-v * std::log(v));
  }
  if (std::abs(mass.value() - 1.0) > 1e-6) {
    throw InvalidDistribution("distribution sums to " + std::to_string(mass.value()));
  }
  return std::max(0.0, h.value());
}

double normalized_entropy(std::span<const double> p) {
  if (p.size() < 2) throw InvalidArgument("normalized entropy needs at least two elements");
  return std::clamp(entropy(p) / std::log(static_cast<double>(p.size())), 0.0, 1.0);
}

double focus(std::span<const double> p) {
  if (p.size() == 1) {
    (void)entropy(p);  // still validates the single mass
    return 1.0;
  }
  return 1.0 - normalized_entropy(p);
}

FocusStats focus_stats(std::span<const double> values, double alpha, double beta) {
  if (values.size() < 2) throw InvalidArgument("focus statistics need at least two values");
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  const double mu = sum.value() / static_cast<double>(values.size());
  CompensatedSum sq;
  for (double v : values) sq.add((v - mu) * (v - mu));
  return {mu, std::sqrt(sq.value() / static_cast<double>(values.size())), alpha, beta};
}

std::string_view band_name(FocusBand band) noexcept {
  switch (band) {
    case FocusBand::under: return "under";
    case FocusBand::in: return "in";
    case FocusBand::over: return "over";
  }
  return "in";
}

FocusBand classify_focus(double f, const FocusStats& stats) {
  if (f >= stats.over_edge()) return FocusBand::over;
  if (f <= stats.under_edge()) return FocusBand::under;
  return FocusBand::in;
}

std::size_t focus_bin(double f, std::size_t bins) noexcept {
  const double clamped = std::clamp(f, 0.0, 1.0);
  const auto b = static_cast<std::size_t>(clamped * static_cast<double>(bins));
  return std::min(b, bins - 1);
}

std::vector<HistogramBin> focus_histogram(std::span<const double> values, std::size_t bins) {
  if (bins == 0) throw InvalidArgument("histogram needs at least one bin");
  std::vector<HistogramBin> hist(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    hist[b].left = static_cast<double>(b) / static_cast<double>(bins);
    hist[b].right = static_cast<double>(b + 1) / static_cast<double>(bins);
  }
  for (double v : values) ++hist[focus_bin(v, bins)].count;
  return hist;
}

}  // namespace refocus
