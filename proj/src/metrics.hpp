#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace preffend {

// Label 1 = fake is the positive class; a post is predicted fake when the
// score reaches the threshold.
struct Confusion {
  std::size_t tp = 0;  // predicted fake, is fake
  std::size_t fp = 0;  // predicted fake, is real
  std::size_t fn = 0;  // predicted real, is fake
  std::size_t tn = 0;  // predicted real, is real

  std::size_t total() const { return tp + fp + fn + tn; }
};

struct ClassStats {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct Metrics {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  ClassStats fake;
  ClassStats real;
  Confusion confusion;

  static Metrics from_confusion(const Confusion& c);
  static Metrics from_predictions(std::span<const int> labels,
                                  std::span<const double> predictions,
                                  double threshold = 0.5);
  std::string to_json_text() const;
};

}  // namespace preffend
