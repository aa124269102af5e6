#pragma once

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "war/tape.hpp"

namespace war {

/// Fully-connected softmax classifier with leaky-relu hidden layers.
/// Parameters live in plain buffers; every forward pass binds them to a tape
/// (as leaves when training, as constants when frozen).
struct MlpModel {
  std::vector<int> widths;  // input, hidden..., classes
  double leaky_slope = 0.01;
  std::vector<std::vector<double>> weights;  // per layer, in*out row-major
  std::vector<std::vector<double>> biases;   // per layer, out

  int layers() const { return static_cast<int>(widths.size()) - 1; }
  int input_dim() const { return widths.front(); }
  int output_dim() const { return widths.back(); }

  static MlpModel init(std::vector<int> widths, uint64_t seed, double leaky_slope = 0.01) {
    if (widths.size() < 2) throw config_error("MlpModel: need at least input and output widths");
    MlpModel m;
    m.widths = std::move(widths);
    m.leaky_slope = leaky_slope;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int l = 0; l < m.layers(); ++l) {
      int fan_in = m.widths[static_cast<size_t>(l)];
      int fan_out = m.widths[static_cast<size_t>(l) + 1];
      double std_dev = std::sqrt(2.0 / ((1.0 + leaky_slope * leaky_slope) * fan_in));
      std::vector<double> w(static_cast<size_t>(fan_in) * fan_out);
      for (double& v : w) v = std_dev * gauss(rng);
      m.weights.push_back(std::move(w));
      m.biases.push_back(std::vector<double>(static_cast<size_t>(fan_out), 0.0));
    }
    return m;
  }

  /// Class probabilities for n rows of raw input, without a tape.
  std::vector<double> forward_values(const double* x, int n) const {
    std::vector<double> cur(x, x + static_cast<size_t>(n) * input_dim());
    int cur_w = input_dim();
    for (int l = 0; l < layers(); ++l) {
      int out_w = widths[static_cast<size_t>(l) + 1];
      std::vector<double> next(static_cast<size_t>(n) * out_w);
      const double* w = weights[static_cast<size_t>(l)].data();
      const double* b = biases[static_cast<size_t>(l)].data();
      for (int i = 0; i < n; ++i) {
        double* orow = next.data() + static_cast<size_t>(i) * out_w;
        for (int j = 0; j < out_w; ++j) orow[j] = b[j];
        const double* irow = cur.data() + static_cast<size_t>(i) * cur_w;
        for (int k = 0; k < cur_w; ++k) {
          double v = irow[k];
          const double* wrow = w + static_cast<size_t>(k) * out_w;
          for (int j = 0; j < out_w; ++j) orow[j] += v * wrow[j];
        }
        if (l + 1 < layers())
          for (int j = 0; j < out_w; ++j)
            if (orow[j] < 0) orow[j] *= leaky_slope;
      }
      cur = std::move(next);
      cur_w = out_w;
    }
    // softmax rows
    for (int i = 0; i < n; ++i) {
      double* row = cur.data() + static_cast<size_t>(i) * cur_w;
      double m = row[0];
      for (int j = 1; j < cur_w; ++j) m = std::max(m, row[j]);
      double s = 0;
      for (int j = 0; j < cur_w; ++j) {
        row[j] = std::exp(row[j] - m);
        s += row[j];
      }
      for (int j = 0; j < cur_w; ++j) row[j] /= s;
    }
    return cur;
  }

  std::vector<int> predict(const double* x, int n) const {
    auto probs = forward_values(x, n);
    int c = output_dim();
    std::vector<int> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double* row = probs.data() + static_cast<size_t>(i) * c;
      int arg = 0;
      for (int j = 1; j < c; ++j)
        if (row[j] > row[arg]) arg = j;
      out[static_cast<size_t>(i)] = arg;
    }
    return out;
  }
};

/// A model bound to a tape for one forward/backward pass. With trainable set,
/// parameters become tape leaves and params() returns them in update order
/// (W0, b0, W1, b1, ...); otherwise they are constants and no gradient can
/// reach them.
class BoundMlp {
 public:
  BoundMlp(Tape& tape, const MlpModel& m, bool trainable) : tape_(&tape), model_(&m) {
    for (int l = 0; l < m.layers(); ++l) {
      int fan_in = m.widths[static_cast<size_t>(l)];
      int fan_out = m.widths[static_cast<size_t>(l) + 1];
      Tensor w({fan_in, fan_out}, m.weights[static_cast<size_t>(l)]);
      Tensor b({fan_out}, m.biases[static_cast<size_t>(l)]);
      if (trainable) {
        w = tape.leaf(w);
        b = tape.leaf(b);
        params_.push_back(w);
        params_.push_back(b);
      }
      ws_.push_back(w);
      bs_.push_back(b);
    }
  }

  Tensor forward_logits(const Tensor& x) const {
    Tensor h = x;
    for (int l = 0; l < model_->layers(); ++l) {
      h = tape_->add(tape_->matmul(h, ws_[static_cast<size_t>(l)]), bs_[static_cast<size_t>(l)]);
      if (l + 1 < model_->layers()) h = tape_->leaky_relu(h, model_->leaky_slope);
    }
    return h;
  }

  Tensor forward(const Tensor& x) const { return tape_->softmax(forward_logits(x)); }

  const std::vector<Tensor>& params() const { return params_; }
  const MlpModel& model() const { return *model_; }
  Tape& tape() const { return *tape_; }

 private:
  Tape* tape_;
  const MlpModel* model_;
  std::vector<Tensor> ws_, bs_;
  std::vector<Tensor> params_;
};

// ---------------------------------------------------------------------------
// Checkpoints: 8-byte magic, little-endian u32 JSON header length, JSON
// header, then the raw parameter doubles in update order.
// ---------------------------------------------------------------------------

inline constexpr char kCheckpointMagic[8] = {'W', 'A', 'R', 'C', 'K', 'P', 'T', '1'};

inline void save_checkpoint(const MlpModel& m, const std::string& path,
                            nlohmann::json extra = {}) {
  nlohmann::json header = std::move(extra);
  header["widths"] = m.widths;
  header["leaky_slope"] = m.leaky_slope;
  std::string hs = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write checkpoint " + path);
  out.write(kCheckpointMagic, 8);
  uint32_t len = static_cast<uint32_t>(hs.size());
  out.write(reinterpret_cast<const char*>(&len), 4);
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  for (int l = 0; l < m.layers(); ++l) {
    const auto& w = m.weights[static_cast<size_t>(l)];
    const auto& b = m.biases[static_cast<size_t>(l)];
    out.write(reinterpret_cast<const char*>(w.data()),
              static_cast<std::streamsize>(w.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(b.data()),
              static_cast<std::streamsize>(b.size() * sizeof(double)));
  }
  if (!out) throw io_error("short write to checkpoint " + path);
}

inline MlpModel load_checkpoint(const std::string& path, nlohmann::json* header_out = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open checkpoint " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kCheckpointMagic, 8) != 0)
    throw io_error(path + ": not a WAR checkpoint (bad magic)");
  uint32_t len = 0;
  in.read(reinterpret_cast<char*>(&len), 4);
  std::string hs(len, '\0');
  in.read(hs.data(), len);
  if (!in) throw io_error(path + ": truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(hs);
  } catch (const std::exception& e) {
    throw io_error(path + ": bad checkpoint header: " + e.what());
  }
  MlpModel m;
  m.widths = header.at("widths").get<std::vector<int>>();
  m.leaky_slope = header.value("leaky_slope", 0.01);
  for (int l = 0; l < m.layers(); ++l) {
    int fan_in = m.widths[static_cast<size_t>(l)];
    int fan_out = m.widths[static_cast<size_t>(l) + 1];
    std::vector<double> w(static_cast<size_t>(fan_in) * fan_out);
    std::vector<double> b(static_cast<size_t>(fan_out));
    in.read(reinterpret_cast<char*>(w.data()),
            static_cast<std::streamsize>(w.size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(b.data()),
            static_cast<std::streamsize>(b.size() * sizeof(double)));
    if (!in) throw io_error(path + ": truncated parameters at layer " + std::to_string(l));
    m.weights.push_back(std::move(w));
    m.biases.push_back(std::move(b));
  }
  if (header_out) *header_out = std::move(header);
  return m;
}

}  // namespace war
