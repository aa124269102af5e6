#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "war/ot.hpp"

namespace war {

struct ClassEmbedding {
  std::string class_name;
  std::vector<double> vector;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

inline double parse_double(const std::string& s, const std::string& context) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw config_error(context + ": not a number: '" + s + "'");
  }
}

}  // namespace detail

/// C_ij = exp(-||v_i - v_j||_2) off the diagonal, 0 on it. Small embedding
/// distances (similar classes) give costs near 1, preserving their boundary.
inline CostMatrix cost_from_embeddings(const std::vector<ClassEmbedding>& embeddings) {
  int n = static_cast<int>(embeddings.size());
  if (n < 2) throw config_error("cost_from_embeddings: need at least 2 embeddings");
  size_t d = embeddings[0].vector.size();
  for (int i = 0; i < n; ++i) {
    if (embeddings[static_cast<size_t>(i)].vector.size() != d)
      throw config_error("cost_from_embeddings: dimension mismatch for class '" +
                         embeddings[static_cast<size_t>(i)].class_name + "'");
    for (int j = i + 1; j < n; ++j)
      if (embeddings[static_cast<size_t>(i)].class_name ==
          embeddings[static_cast<size_t>(j)].class_name)
        throw config_error("cost_from_embeddings: duplicate class name '" +
                           embeddings[static_cast<size_t>(i)].class_name + "'");
  }
  std::vector<double> c(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double sq = 0;
      for (size_t k = 0; k < d; ++k) {
        double diff = embeddings[static_cast<size_t>(i)].vector[k] -
                      embeddings[static_cast<size_t>(j)].vector[k];
        sq += diff * diff;
      }
      double cost = std::exp(-std::sqrt(sq));
      c[static_cast<size_t>(i) * n + j] = cost;
      c[static_cast<size_t>(j) * n + i] = cost;
    }
  return CostMatrix::checked(n, std::move(c));
}

/// Uninformative 0-1 cost: zeros on the diagonal, ones elsewhere.
inline CostMatrix cost_zero_one(int num_classes) {
  if (num_classes < 2) throw config_error("cost_zero_one: need at least 2 classes");
  std::vector<double> c(static_cast<size_t>(num_classes) * num_classes, 1.0);
  for (int i = 0; i < num_classes; ++i) c[static_cast<size_t>(i) * num_classes + i] = 0.0;
  return CostMatrix::checked(num_classes, std::move(c));
}

struct NamedCost {
  CostMatrix cost;
  std::vector<std::string> class_names;
};

/// Headered CSV: first row ",name0,name1,..."; each following row
/// "name,c0,c1,...". Symmetry and the zero diagonal are enforced on load.
inline NamedCost load_cost(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open cost file " + path);
  std::string line;
  if (!std::getline(in, line)) throw config_error(path + ": empty cost file");
  auto header = detail::split_csv_line(line);
  if (header.size() < 3 || !header[0].empty())
    throw config_error(path + ": header must be ',name0,name1,...'");
  std::vector<std::string> names(header.begin() + 1, header.end());
  int n = static_cast<int>(names.size());

  std::vector<double> entries(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (!std::getline(in, line))
      throw config_error(path + ": expected " + std::to_string(n) + " rows, got " +
                         std::to_string(i));
    auto fields = detail::split_csv_line(line);
    if (static_cast<int>(fields.size()) != n + 1)
      throw config_error(path + ": row " + std::to_string(i) + " has " +
                         std::to_string(fields.size() - 1) + " values, expected " +
                         std::to_string(n));
    if (fields[0] != names[static_cast<size_t>(i)])
      throw config_error(path + ": row name '" + fields[0] + "' does not match column name '" +
                         names[static_cast<size_t>(i)] + "'");
    for (int j = 0; j < n; ++j)
      entries[static_cast<size_t>(i) * n + j] =
          detail::parse_double(fields[static_cast<size_t>(j) + 1],
                               path + " row " + names[static_cast<size_t>(i)]);
  }
  return NamedCost{CostMatrix::checked(n, std::move(entries), &names), std::move(names)};
}

inline void save_cost(const CostMatrix& c, const std::vector<std::string>& names,
                      const std::string& path) {
  if (static_cast<int>(names.size()) != c.dim())
    throw config_error("save_cost: " + std::to_string(names.size()) + " names for dimension " +
                       std::to_string(c.dim()));
  for (const auto& name : names)
    if (name.find(',') != std::string::npos)
      throw config_error("save_cost: class name '" + name + "' contains a comma");
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path);
  out.precision(17);
  for (const auto& name : names) out << "," << name;
  out << "\n";
  for (int i = 0; i < c.dim(); ++i) {
    out << names[static_cast<size_t>(i)];
    for (int j = 0; j < c.dim(); ++j) out << "," << c.at(i, j);
    out << "\n";
  }
}

/// One record per class: name,v1,...,vd (no header).
inline std::vector<ClassEmbedding> load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open embeddings file " + path);
  std::vector<ClassEmbedding> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() < 2)
      throw config_error(path + ":" + std::to_string(lineno) + ": expected name,v1,...,vd");
    ClassEmbedding e;
    e.class_name = fields[0];
    for (size_t k = 1; k < fields.size(); ++k)
      e.vector.push_back(
          detail::parse_double(fields[k], path + ":" + std::to_string(lineno)));
    out.push_back(std::move(e));
  }
  if (out.size() < 2) throw config_error(path + ": need at least 2 embeddings");
  for (size_t i = 1; i < out.size(); ++i)
    if (out[i].vector.size() != out[0].vector.size())
      throw config_error(path + ": dimension mismatch for class '" + out[i].class_name + "'");
  return out;
}

}  // namespace war
