#include "checkpoint.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace preffend {

Tensor ParamRegistry::add(const std::string& name, Tensor tensor) {
  for (const auto& [existing, _] : items_) {
    if (existing == name) {
      throw std::invalid_argument("param registry: duplicate name " + name);
    }
  }
  tensor.set_trainable(true);
  items_.emplace_back(name, tensor);
  return tensor;
}

Tensor ParamRegistry::fan_in_uniform(const std::string& name, std::size_t rows,
                                     std::size_t cols, std::size_t fan_in,
                                     std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  return add(name, Tensor::uniform(rows, cols, -bound, bound, rng, true));
}

Tensor ParamRegistry::find(const std::string& name) const {
  for (const auto& [existing, tensor] : items_) {
    if (existing == name) return tensor;
  }
  throw std::invalid_argument("param registry: unknown name " + name);
}

void ParamRegistry::zero_grads() {
  for (auto& [_, tensor] : items_) tensor.zero_grad();
}

void save_checkpoint(const std::string& path, const ParamRegistry& params) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << kCheckpointMagic << "\n";
  char buf[40];
  for (const auto& [name, tensor] : params.items()) {
    out << "param " << name << " " << tensor.rows() << " " << tensor.cols() << "\n";
    const auto vals = tensor.values();
    for (std::size_t i = 0; i < vals.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", vals[i]);
      out << buf << (i + 1 == vals.size() ? "\n" : " ");
    }
    if (vals.empty()) out << "\n";
  }
  if (!out) throw std::runtime_error("write failed for checkpoint: " + path);
}

void load_checkpoint(const std::string& path, ParamRegistry& params) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  std::string magic;
  std::getline(in, magic);
  if (magic != kCheckpointMagic) {
    throw std::runtime_error("checkpoint " + path + ": bad magic \"" + magic + "\"");
  }
  std::size_t loaded = 0;
  std::string keyword;
  while (in >> keyword) {
    if (keyword != "param") {
      throw std::runtime_error("checkpoint " + path + ": expected 'param', got " + keyword);
    }
    std::string name;
    std::size_t rows = 0, cols = 0;
    if (!(in >> name >> rows >> cols)) {
      throw std::runtime_error("checkpoint " + path + ": truncated header");
    }
    Tensor target = params.find(name);
    if (target.rows() != rows || target.cols() != cols) {
      throw std::runtime_error("checkpoint " + path + ": shape mismatch for " + name);
    }
    auto vals = target.values_mut();
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (!(in >> vals[i])) {
        throw std::runtime_error("checkpoint " + path + ": truncated values for " + name);
      }
    }
    ++loaded;
  }
  if (loaded != params.items().size()) {
    throw std::runtime_error("checkpoint " + path + ": has " + std::to_string(loaded) +
                             " params, model expects " +
                             std::to_string(params.items().size()));
  }
}

}  // namespace preffend
