#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace enorm {

enum class ArchKind { mlp, cnn, rnn, crnn };

// Declarative description of one audio-tagging network. The input is a
// mel-spectrogram patch (mel_bands x frames); the head is always one linear
// layer to num_classes followed by a sigmoid.
struct ArchitectureConfig {
  ArchKind kind = ArchKind::mlp;
  int linear_layers = 0;      // MLP
  int hidden_size = 0;        // MLP
  int conv_layers = 0;        // CNN / CRNN
  int conv_channels = 0;      // CNN / CRNN
  int recurrent_layers = 0;   // RNN / CRNN
  int recurrent_hidden = 0;   // RNN / CRNN
  int mel_bands = 128;
  int frames = 64;
  int num_classes = 10;

  bool operator==(const ArchitectureConfig&) const = default;
};

// Throws ValidationError unless the layer groups required by `kind` are
// positive and the unused groups are zero.
void validate(const ArchitectureConfig& cfg);

// Stable id such as mlp_l4_h2048 or crnn_cl2_c728_rl2_h256.
std::string config_id(const ArchitectureConfig& cfg);

struct LayerCost {
  std::string layer;          // e.g. "conv2 128->128 @64x32"
  std::int64_t params = 0;
  std::int64_t flops = 0;     // per-sample forward pass

  bool operator==(const LayerCost&) const = default;
};

struct CostReport {
  std::vector<LayerCost> per_layer;
  std::int64_t params = 0;         // sum of per_layer params, exactly
  std::int64_t flops_forward = 0;  // sum of per_layer flops, exactly
};

// Counting conventions, applied uniformly:
//  - one multiply-accumulate = 2 FLOPs, bias folded into the MAC count
//  - linear in->out: params in*out + out, flops 2*in*out
//  - Conv2d 3x3 stride 1 pad 1 (+ ReLU + 2x2 max-pool per layer):
//    params 9*Cin*Cout + Cout, flops 2*9*Cin*Cout*Hout*Wout; activation and
//    pooling count as 0
//  - GRU layer: params 3*((in+hidden)*hidden + 2*hidden), flops per timestep
//    2*3*hidden*(in+hidden), gate elementwise arithmetic counts as 0
CostReport count_cost(const ArchitectureConfig& cfg);

// Building blocks behind count_cost, exposed so stacks can be costed and
// composed at arbitrary interface shapes.
struct ConvStackCost {
  std::vector<LayerCost> layers;
  std::int64_t params = 0;
  std::int64_t flops = 0;
  int out_channels = 0;
  int out_h = 0;
  int out_w = 0;
};
ConvStackCost conv_stack_cost(int n_layers, int channels, int in_channels,
                              int in_h, int in_w);

struct GruStackCost {
  std::vector<LayerCost> layers;
  std::int64_t params = 0;
  std::int64_t flops = 0;
};
GruStackCost gru_stack_cost(int n_layers, int hidden, int input_dim,
                            int timesteps);

LayerCost linear_cost(const std::string& name, std::int64_t in, std::int64_t out);

// Conventional 1 backward = 2x forward multiplier. Reporting convenience
// only; regressions always use the per-sample forward count.
std::int64_t training_flops(std::int64_t flops_forward, std::int64_t samples,
                            std::int64_t epochs);

// The built-in configuration grid behind the CLI's --paper-set: every axis
// combination expanded into a concrete config. The axes expand to 45 configs
// while the benchmark set they describe reports 43 trained models; both
// counts are surfaced, nothing is collapsed silently.
struct ConfigGrid {
  std::vector<std::pair<std::string, ArchitectureConfig>> configs;
  int expanded_count = 0;
  int reported_count = 0;
  std::string note;
};
ConfigGrid builtin_config_grid();

}  // namespace enorm
