#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tensor.hpp"

namespace preffend {

// Named trainable tensors in a fixed registration order. The order defines
// parameter initialization, optimizer iteration, and checkpoint layout, which
// keeps runs with the same seed bit-identical.
class ParamRegistry {
 public:
  Tensor add(const std::string& name, Tensor tensor);
  Tensor fan_in_uniform(const std::string& name, std::size_t rows, std::size_t cols,
                        std::size_t fan_in, std::mt19937_64& rng);

  const std::vector<std::pair<std::string, Tensor>>& items() const { return items_; }
  Tensor find(const std::string& name) const;
  void zero_grads();

 private:
  std::vector<std::pair<std::string, Tensor>> items_;
};

inline constexpr const char* kCheckpointMagic = "PREFFEND-CKPT-1";

// Text checkpoint: magic line, then one `param <name> <rows> <cols>` line per
// tensor followed by its row-major values at full double precision.
void save_checkpoint(const std::string& path, const ParamRegistry& params);

// Loads values into an already-built registry; names and shapes must match
// exactly.
void load_checkpoint(const std::string& path, ParamRegistry& params);

}  // namespace preffend
