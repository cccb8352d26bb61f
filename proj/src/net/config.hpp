#pragma once

#include <string>

#include "util/error.hpp"

namespace exknet::net {

// Gated dilated-causal-convolution stack: `blocks` repetitions of layers
// with dilations 1, 2, 4, ... 2^(layers_per_block-1).
struct NetConfig {
  int blocks = 2;
  int layers_per_block = 8;
  int residual_channels = 64;
  int skip_channels = 64;
  int quantization_channels = 256;
  int condition_dim = 43;
  int kernel_size = 2;

  int total_layers() const { return blocks * layers_per_block; }
  int dilation(int layer) const { return 1 << (layer % layers_per_block); }

  void validate() const {
    if (blocks <= 0 || layers_per_block <= 0 || residual_channels <= 0 || skip_channels <= 0 ||
        condition_dim <= 0) {
      throw_argument("NetConfig: all sizes must be positive");
    }
    if (quantization_channels != 256) throw_argument("NetConfig: quantization_channels must be 256");
    if (kernel_size != 2) throw_argument("NetConfig: kernel_size must be 2");
    if (layers_per_block > 30) throw_argument("NetConfig: layers_per_block out of range");
  }

  bool operator==(const NetConfig&) const = default;
};

// Number of past samples (including the current input) that can influence
// one output step.
inline long receptive_field(const NetConfig& c) {
  long per_block = 0;
  for (int l = 0; l < c.layers_per_block; ++l) {
    per_block += (1L << l) * (c.kernel_size - 1);
  }
  return 1 + static_cast<long>(c.blocks) * per_block;
}

// Paper-scale architecture (3 x 10 layers, 512/256 channels).
inline NetConfig paper_config() {
  NetConfig c;
  c.blocks = 3;
  c.layers_per_block = 10;
  c.residual_channels = 512;
  c.skip_channels = 256;
  return c;
}

}  // namespace exknet::net
