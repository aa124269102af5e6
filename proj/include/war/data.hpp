#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "war/noise.hpp"
#include "war/tensor.hpp"

namespace war {

struct Dataset {
  int n = 0, d = 0;
  std::vector<double> features;  // n*d row-major
  std::vector<int> labels;
  std::vector<std::string> class_names;
  std::string split_tag = "train";

  // Affine normalization bookkeeping: stored = (raw - offset) / scale.
  bool normalized = false;
  double offset = 0.0, scale = 1.0;

  int num_classes() const {
    if (!class_names.empty()) return static_cast<int>(class_names.size());
    int m = 0;
    for (int y : labels) m = std::max(m, y + 1);
    return m;
  }

  const double* row(int i) const { return features.data() + static_cast<size_t>(i) * d; }

  void normalize(double off, double sc) {
    if (normalized) return;
    for (double& v : features) v = (v - off) / sc;
    offset = off;
    scale = sc;
    normalized = true;
  }

  void denormalize() {
    if (!normalized) return;
    for (double& v : features) v = v * scale + offset;
    normalized = false;
    offset = 0.0;
    scale = 1.0;
  }

  void validate() const {
    if (static_cast<int64_t>(features.size()) != static_cast<int64_t>(n) * d)
      throw config_error("Dataset: feature buffer does not match n*d");
    if (static_cast<int>(labels.size()) != n)
      throw config_error("Dataset: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(n) + " samples");
    int c = num_classes();
    for (int y : labels)
      if (y < 0 || y >= c)
        throw config_error("Dataset: label " + std::to_string(y) + " out of range [0," +
                           std::to_string(c) + ")");
  }
};

// ---------------------------------------------------------------------------
// Toy three-class problem: two close classes (red, orange) and one far away
// (black), with a fraction of the innermost red points relabeled black.
// ---------------------------------------------------------------------------

struct ToyData {
  Dataset train;                  // labels carry the injected noise
  std::vector<int> clean_labels;  // hidden ground truth
  std::vector<uint8_t> flip_mask; // 1 where a label was corrupted
};

inline const std::vector<std::string>& toy_class_names() {
  static const std::vector<std::string> names = {"black", "red", "orange"};
  return names;
}

inline ToyData toy_three_class(int n_per_class, double noise_fraction, uint64_t seed) {
  if (n_per_class < 10) throw config_error("toy_three_class: need n_per_class >= 10");
  if (!(noise_fraction >= 0 && noise_fraction < 1))
    throw config_error("toy_three_class: noise_fraction must be in [0,1)");
  constexpr double kSigma = 0.5;
  const double means[3][2] = {{0.0, 4.0}, {0.0, 0.0}, {1.2, 0.0}};  // black, red, orange

  ToyData out;
  Dataset& ds = out.train;
  ds.d = 2;
  ds.n = 3 * n_per_class;
  ds.class_names = toy_class_names();
  ds.features.resize(static_cast<size_t>(ds.n) * 2);
  ds.labels.resize(static_cast<size_t>(ds.n));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, kSigma);
  for (int c = 0; c < 3; ++c)
    for (int k = 0; k < n_per_class; ++k) {
      int i = c * n_per_class + k;
      ds.features[static_cast<size_t>(i) * 2] = means[c][0] + gauss(rng);
      ds.features[static_cast<size_t>(i) * 2 + 1] = means[c][1] + gauss(rng);
      ds.labels[static_cast<size_t>(i)] = c;
    }

  out.clean_labels = ds.labels;
  out.flip_mask.assign(static_cast<size_t>(ds.n), 0);

  // Corrupt the red points closest to the red mean (the points inside the
  // cluster core) so the noise sits in the red region like in the paper's
  // illustration.
  int flips = static_cast<int>(noise_fraction * n_per_class);
  if (flips > 0) {
    std::vector<std::pair<double, int>> red;
    for (int i = n_per_class; i < 2 * n_per_class; ++i) {
      double dx = ds.features[static_cast<size_t>(i) * 2] - means[1][0];
      double dy = ds.features[static_cast<size_t>(i) * 2 + 1] - means[1][1];
      red.push_back({dx * dx + dy * dy, i});
    }
    std::sort(red.begin(), red.end());
    for (int k = 0; k < flips; ++k) {
      int i = red[static_cast<size_t>(k)].second;
      ds.labels[static_cast<size_t>(i)] = 0;  // black
      out.flip_mask[static_cast<size_t>(i)] = 1;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// IDX (the MNIST family binary layout) and CSV loading.
// ---------------------------------------------------------------------------

namespace detail {

inline uint32_t read_u32_be(std::istream& in, const std::string& path, int64_t& offset) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in)
    throw io_error(path + ": truncated at byte offset " + std::to_string(offset));
  offset += 4;
  return (static_cast<uint32_t>(b[0]) << 24) | (static_cast<uint32_t>(b[1]) << 16) |
         (static_cast<uint32_t>(b[2]) << 8) | static_cast<uint32_t>(b[3]);
}

inline void write_u32_be(std::ostream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace detail

/// Reads an IDX image/label pair. Image bytes are scaled to [-1, 1].
inline Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw io_error("cannot open " + images_path);
  int64_t off = 0;
  uint32_t magic = detail::read_u32_be(img, images_path, off);
  if (magic != 0x00000803u)
    throw io_error(images_path + ": bad magic 0x" + std::to_string(magic) + " at byte offset 0" +
                   " (expected 0x00000803)");
  uint32_t n = detail::read_u32_be(img, images_path, off);
  uint32_t rows = detail::read_u32_be(img, images_path, off);
  uint32_t cols = detail::read_u32_be(img, images_path, off);
  size_t count = static_cast<size_t>(n) * rows * cols;
  std::vector<unsigned char> pixels(count);
  img.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(count));
  if (static_cast<size_t>(img.gcount()) != count)
    throw io_error(images_path + ": truncated at byte offset " +
                   std::to_string(off + img.gcount()));

  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw io_error("cannot open " + labels_path);
  int64_t loff = 0;
  uint32_t lmagic = detail::read_u32_be(lab, labels_path, loff);
  if (lmagic != 0x00000801u)
    throw io_error(labels_path + ": bad magic at byte offset 0 (expected 0x00000801)");
  uint32_t ln = detail::read_u32_be(lab, labels_path, loff);
  if (ln != n)
    throw io_error(labels_path + ": " + std::to_string(ln) + " labels for " + std::to_string(n) +
                   " images");
  std::vector<unsigned char> ybytes(ln);
  lab.read(reinterpret_cast<char*>(ybytes.data()), static_cast<std::streamsize>(ln));
  if (static_cast<size_t>(lab.gcount()) != ln)
    throw io_error(labels_path + ": truncated at byte offset " +
                   std::to_string(loff + lab.gcount()));

  Dataset ds;
  ds.n = static_cast<int>(n);
  ds.d = static_cast<int>(rows * cols);
  ds.features.resize(count);
  for (size_t i = 0; i < count; ++i) ds.features[i] = static_cast<double>(pixels[i]);
  ds.labels.assign(ybytes.begin(), ybytes.end());
  ds.normalize(127.5, 127.5);  // [0,255] -> [-1,1]
  return ds;
}

inline void save_idx_images(const std::string& path, const std::vector<unsigned char>& pixels,
                            int n, int rows, int cols) {
  if (static_cast<size_t>(n) * rows * cols != pixels.size())
    throw config_error("save_idx_images: size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path);
  detail::write_u32_be(out, 0x00000803u);
  detail::write_u32_be(out, static_cast<uint32_t>(n));
  detail::write_u32_be(out, static_cast<uint32_t>(rows));
  detail::write_u32_be(out, static_cast<uint32_t>(cols));
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
}

inline void save_idx_labels(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path);
  detail::write_u32_be(out, 0x00000801u);
  detail::write_u32_be(out, static_cast<uint32_t>(labels.size()));
  for (int y : labels) {
    if (y < 0 || y > 255) throw config_error("save_idx_labels: label out of byte range");
    unsigned char b = static_cast<unsigned char>(y);
    out.write(reinterpret_cast<const char*>(&b), 1);
  }
}

/// Headered CSV: label,f1,...,fd. Features are taken as-is (no rescaling).
inline Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw config_error(path + ": empty file");
  auto header = detail::split_csv_line(line);
  if (header.empty() || header[0] != "label")
    throw config_error(path + ": header must start with 'label'");
  Dataset ds;
  ds.d = static_cast<int>(header.size()) - 1;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = detail::split_csv_line(line);
    if (static_cast<int>(fields.size()) != ds.d + 1)
      throw config_error(path + ":" + std::to_string(lineno) + ": expected " +
                         std::to_string(ds.d + 1) + " fields");
    ds.labels.push_back(static_cast<int>(
        detail::parse_double(fields[0], path + ":" + std::to_string(lineno))));
    for (int k = 0; k < ds.d; ++k)
      ds.features.push_back(detail::parse_double(fields[static_cast<size_t>(k) + 1],
                                                 path + ":" + std::to_string(lineno)));
    ++ds.n;
  }
  ds.validate();
  return ds;
}

inline void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path);
  out.precision(17);
  out << "label";
  for (int k = 0; k < ds.d; ++k) out << ",f" << (k + 1);
  out << "\n";
  for (int i = 0; i < ds.n; ++i) {
    out << ds.labels[static_cast<size_t>(i)];
    for (int k = 0; k < ds.d; ++k) out << "," << ds.row(i)[k];
    out << "\n";
  }
}

// ---------------------------------------------------------------------------
// Dataset manifest: a JSON file naming the data files and class names.
// ---------------------------------------------------------------------------

inline Dataset load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open manifest " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw config_error(path + ": invalid JSON: " + e.what());
  }
  static const std::vector<std::string> known = {"format", "images", "labels", "csv",
                                                 "class_names", "split"};
  for (auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw config_error(path + ": unknown manifest key '" + key + "'");
  }
  if (!j.contains("format")) throw config_error(path + ": manifest needs 'format'");
  std::string format = j["format"];
  auto dir = std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp.string() : (dir / fp).string();
  };

  Dataset ds;
  if (format == "idx") {
    if (!j.contains("images") || !j.contains("labels"))
      throw config_error(path + ": idx manifest needs 'images' and 'labels'");
    ds = load_idx(resolve(j["images"]), resolve(j["labels"]));
  } else if (format == "csv") {
    if (!j.contains("csv")) throw config_error(path + ": csv manifest needs 'csv'");
    ds = load_csv(resolve(j["csv"]));
  } else {
    throw config_error(path + ": unknown format '" + format + "'");
  }
  if (j.contains("class_names"))
    ds.class_names = j["class_names"].get<std::vector<std::string>>();
  if (j.contains("split")) ds.split_tag = j["split"];
  ds.validate();
  return ds;
}

inline void save_manifest(const std::string& path, const std::string& format,
                          const std::string& images, const std::string& labels,
                          const std::vector<std::string>& class_names,
                          const std::string& split = "train") {
  nlohmann::json j;
  j["format"] = format;
  if (format == "idx") {
    j["images"] = images;
    j["labels"] = labels;
  } else {
    j["csv"] = images;
  }
  if (!class_names.empty()) j["class_names"] = class_names;
  j["split"] = split;
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Mini-batching with a seeded per-epoch shuffle.
// ---------------------------------------------------------------------------

struct Batch {
  Tensor features;  // [nb, d]
  Tensor one_hot;   // [nb, C]
  std::vector<int> indices;
};

/// One epoch's batches for a given shuffle seed: same seed, same order.
/// The final partial batch is kept.
class Batches {
 public:
  Batches(const Dataset& ds, int batch_size, uint64_t shuffle_seed)
      : ds_(&ds), batch_size_(batch_size), num_classes_(ds.num_classes()) {
    if (batch_size < 1) throw config_error("batches: batch_size must be >= 1");
    perm_.resize(static_cast<size_t>(ds.n));
    std::iota(perm_.begin(), perm_.end(), 0);
    std::mt19937_64 rng(shuffle_seed);
    std::shuffle(perm_.begin(), perm_.end(), rng);
  }

  size_t count() const {
    return (static_cast<size_t>(ds_->n) + batch_size_ - 1) / static_cast<size_t>(batch_size_);
  }

  Batch get(size_t k) const {
    size_t lo = k * static_cast<size_t>(batch_size_);
    size_t hi = std::min(lo + static_cast<size_t>(batch_size_), static_cast<size_t>(ds_->n));
    int nb = static_cast<int>(hi - lo);
    Batch b;
    b.indices.assign(perm_.begin() + static_cast<int64_t>(lo),
                     perm_.begin() + static_cast<int64_t>(hi));
    std::vector<double> x(static_cast<size_t>(nb) * ds_->d);
    std::vector<double> y(static_cast<size_t>(nb) * num_classes_, 0.0);
    for (int r = 0; r < nb; ++r) {
      const double* src = ds_->row(b.indices[static_cast<size_t>(r)]);
      std::copy(src, src + ds_->d, x.begin() + static_cast<int64_t>(r) * ds_->d);
      y[static_cast<size_t>(r) * num_classes_ +
        ds_->labels[static_cast<size_t>(b.indices[static_cast<size_t>(r)])]] = 1.0;
    }
    b.features = Tensor({nb, ds_->d}, std::move(x));
    b.one_hot = Tensor({nb, num_classes_}, std::move(y));
    return b;
  }

 private:
  const Dataset* ds_;
  int batch_size_;
  int num_classes_;
  std::vector<int> perm_;
};

}  // namespace war
