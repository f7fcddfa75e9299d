#pragma once

#include <vector>

#include "checkpoint.hpp"

namespace preffend {

// Adam with bias correction. Parameters with no populated gradient in a step
// are treated as having zero gradient.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(ParamRegistry& params, double learning_rate,
                         double decay1 = 0.9, double decay2 = 0.999,
                         double epsilon = 1e-8);

  void step();

 private:
  ParamRegistry& params_;
  std::vector<std::vector<double>> first_moment_;
  std::vector<std::vector<double>> second_moment_;
  double learning_rate_;
  double decay1_;
  double decay2_;
  double epsilon_;
  long steps_ = 0;
};

}  // namespace preffend
