#include "enorm/archcost.hpp"

#include <string>

#include "enorm/errors.hpp"

namespace enorm {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

std::string dims(std::int64_t in, std::int64_t out) {
  return std::to_string(in) + "->" + std::to_string(out);
}

}  // namespace

void validate(const ArchitectureConfig& cfg) {
  require(cfg.mel_bands > 0, "mel_bands must be > 0");
  require(cfg.frames > 0, "frames must be > 0");
  require(cfg.num_classes > 0, "num_classes must be > 0");
  const bool has_linear = cfg.linear_layers != 0 || cfg.hidden_size != 0;
  const bool has_conv = cfg.conv_layers != 0 || cfg.conv_channels != 0;
  const bool has_recurrent = cfg.recurrent_layers != 0 || cfg.recurrent_hidden != 0;
  switch (cfg.kind) {
    case ArchKind::mlp:
      require(cfg.linear_layers >= 1 && cfg.hidden_size >= 1,
              "mlp needs linear_layers >= 1 and hidden_size >= 1");
      require(!has_conv && !has_recurrent,
              "mlp must leave conv and recurrent groups at zero");
      break;
    case ArchKind::cnn:
      require(cfg.conv_layers >= 1 && cfg.conv_channels >= 1,
              "cnn needs conv_layers >= 1 and conv_channels >= 1");
      require(!has_linear && !has_recurrent,
              "cnn must leave linear and recurrent groups at zero");
      break;
    case ArchKind::rnn:
      require(cfg.recurrent_layers >= 1 && cfg.recurrent_hidden >= 1,
              "rnn needs recurrent_layers >= 1 and recurrent_hidden >= 1");
      require(!has_linear && !has_conv,
              "rnn must leave linear and conv groups at zero");
      break;
    case ArchKind::crnn:
      require(cfg.conv_layers >= 1 && cfg.conv_channels >= 1,
              "crnn needs conv_layers >= 1 and conv_channels >= 1");
      require(cfg.recurrent_layers >= 1 && cfg.recurrent_hidden >= 1,
              "crnn needs recurrent_layers >= 1 and recurrent_hidden >= 1");
      require(!has_linear, "crnn must leave the linear group at zero");
      break;
  }
  if (cfg.kind == ArchKind::cnn || cfg.kind == ArchKind::crnn) {
    int h = cfg.mel_bands, w = cfg.frames;
    for (int l = 0; l < cfg.conv_layers; ++l) {
      require(h >= 2 && w >= 2, "conv stack pools the input away: " +
                                    std::to_string(cfg.conv_layers) +
                                    " layers on " + std::to_string(cfg.mel_bands) +
                                    "x" + std::to_string(cfg.frames));
      h /= 2;
      w /= 2;
    }
  }
}

std::string config_id(const ArchitectureConfig& cfg) {
  switch (cfg.kind) {
    case ArchKind::mlp:
      return "mlp_l" + std::to_string(cfg.linear_layers) + "_h" +
             std::to_string(cfg.hidden_size);
    case ArchKind::cnn:
      return "cnn_cl" + std::to_string(cfg.conv_layers) + "_c" +
             std::to_string(cfg.conv_channels);
    case ArchKind::rnn:
      return "rnn_rl" + std::to_string(cfg.recurrent_layers) + "_h" +
             std::to_string(cfg.recurrent_hidden);
    case ArchKind::crnn:
      return "crnn_cl" + std::to_string(cfg.conv_layers) + "_c" +
             std::to_string(cfg.conv_channels) + "_rl" +
             std::to_string(cfg.recurrent_layers) + "_h" +
             std::to_string(cfg.recurrent_hidden);
  }
  throw ValidationError("bad ArchKind");
}

LayerCost linear_cost(const std::string& name, std::int64_t in, std::int64_t out) {
  LayerCost c;
  c.layer = name + " " + dims(in, out);
  c.params = in * out + out;
  c.flops = 2 * in * out;
  return c;
}

ConvStackCost conv_stack_cost(int n_layers, int channels, int in_channels,
                              int in_h, int in_w) {
  ConvStackCost out;
  out.out_h = in_h;
  out.out_w = in_w;
  std::int64_t cin = in_channels;
  const std::int64_t ch = channels;
  for (int l = 0; l < n_layers; ++l) {
    // 3x3 conv, stride 1, pad 1 keeps HxW; the 2x2 max pool halves it after.
    LayerCost c;
    c.layer = "conv" + std::to_string(l + 1) + " " + dims(cin, ch) + " @" +
              std::to_string(out.out_h) + "x" + std::to_string(out.out_w);
    c.params = 9 * cin * ch + ch;
    c.flops = 2 * 9 * cin * ch * out.out_h * out.out_w;
    out.layers.push_back(c);
    out.params += c.params;
    out.flops += c.flops;
    cin = ch;
    out.out_h /= 2;
    out.out_w /= 2;
  }
  out.out_channels = channels;
  return out;
}

GruStackCost gru_stack_cost(int n_layers, int hidden, int input_dim,
                            int timesteps) {
  GruStackCost out;
  std::int64_t in = input_dim;
  const std::int64_t h = hidden;
  for (int l = 0; l < n_layers; ++l) {
    // Three gates, each (in + hidden) -> hidden with input and hidden biases.
    LayerCost c;
    c.layer = "gru" + std::to_string(l + 1) + " " + dims(in, h) + " @" +
              std::to_string(timesteps) + "t";
    c.params = 3 * ((in + h) * h + 2 * h);
    c.flops = 2 * 3 * h * (in + h) * timesteps;
    out.layers.push_back(c);
    out.params += c.params;
    out.flops += c.flops;
    in = h;
  }
  return out;
}

CostReport count_cost(const ArchitectureConfig& cfg) {
  validate(cfg);
  CostReport rep;
  auto add = [&rep](const LayerCost& c) {
    rep.per_layer.push_back(c);
    rep.params += c.params;
    rep.flops_forward += c.flops;
  };

  switch (cfg.kind) {
    case ArchKind::mlp: {
      // Flattened spectrogram in, equal-width hidden stack, classifier head.
      std::int64_t in = static_cast<std::int64_t>(cfg.mel_bands) * cfg.frames;
      for (int l = 0; l < cfg.linear_layers; ++l) {
        add(linear_cost("fc" + std::to_string(l + 1), in, cfg.hidden_size));
        in = cfg.hidden_size;
      }
      add(linear_cost("head", in, cfg.num_classes));
      break;
    }
    case ArchKind::cnn: {
      const auto conv = conv_stack_cost(cfg.conv_layers, cfg.conv_channels, 1,
                                        cfg.mel_bands, cfg.frames);
      for (const auto& c : conv.layers) add(c);
      // Global average pool leaves one value per channel for the head.
      add(linear_cost("head", conv.out_channels, cfg.num_classes));
      break;
    }
    case ArchKind::rnn: {
      const auto gru = gru_stack_cost(cfg.recurrent_layers, cfg.recurrent_hidden,
                                      cfg.mel_bands, cfg.frames);
      for (const auto& c : gru.layers) add(c);
      add(linear_cost("head", cfg.recurrent_hidden, cfg.num_classes));
      break;
    }
    case ArchKind::crnn: {
      const auto conv = conv_stack_cost(cfg.conv_layers, cfg.conv_channels, 1,
                                        cfg.mel_bands, cfg.frames);
      for (const auto& c : conv.layers) add(c);
      // Frequency axis folds into features, the time axis feeds the GRU.
      const auto gru = gru_stack_cost(cfg.recurrent_layers, cfg.recurrent_hidden,
                                      conv.out_channels * conv.out_h, conv.out_w);
      for (const auto& c : gru.layers) add(c);
      add(linear_cost("head", cfg.recurrent_hidden, cfg.num_classes));
      break;
    }
  }
  return rep;
}

std::int64_t training_flops(std::int64_t flops_forward, std::int64_t samples,
                            std::int64_t epochs) {
  // Backward pass counted as twice the forward pass.
  return 3 * flops_forward * samples * epochs;
}

ConfigGrid builtin_config_grid() {
  ConfigGrid grid;
  auto push = [&grid](ArchitectureConfig cfg) {
    validate(cfg);
    grid.configs.emplace_back(config_id(cfg), cfg);
  };

  // MLP: depth x width.
  for (int layers : {1, 4}) {
    for (int width : {512, 1024, 2048, 4096, 8192}) {
      ArchitectureConfig c;
      c.kind = ArchKind::mlp;
      c.linear_layers = layers;
      c.hidden_size = width;
      push(c);
    }
  }
  // CNN: depth x channel width.
  for (int layers : {2, 4}) {
    for (int ch : {24, 48, 64, 128, 256, 728}) {
      ArchitectureConfig c;
      c.kind = ArchKind::cnn;
      c.conv_layers = layers;
      c.conv_channels = ch;
      push(c);
    }
  }
  // RNN: depth x hidden size, plus one narrow single-layer point.
  {
    ArchitectureConfig c;
    c.kind = ArchKind::rnn;
    c.recurrent_layers = 1;
    c.recurrent_hidden = 64;
    push(c);
  }
  for (int layers : {2, 3}) {
    for (int hidden : {128, 256, 512, 1024, 2048}) {
      ArchitectureConfig c;
      c.kind = ArchKind::rnn;
      c.recurrent_layers = layers;
      c.recurrent_hidden = hidden;
      push(c);
    }
  }
  // CRNN: conv depth/width x recurrent size.
  for (int conv_layers : {2, 4}) {
    for (int ch : {64, 128, 728}) {
      for (int hidden : {128, 256}) {
        ArchitectureConfig c;
        c.kind = ArchKind::crnn;
        c.conv_layers = conv_layers;
        c.conv_channels = ch;
        c.recurrent_layers = 2;
        c.recurrent_hidden = hidden;
        push(c);
      }
    }
  }

  grid.expanded_count = static_cast<int>(grid.configs.size());
  grid.reported_count = 43;
  grid.note =
      "grid axes expand to " + std::to_string(grid.expanded_count) +
      " configurations while the benchmark set is described as " +
      std::to_string(grid.reported_count) +
      "; both counts are kept and the discrepancy is reported as-is";
  return grid;
}

}  // namespace enorm
