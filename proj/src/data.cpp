#include "herit/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "herit/errors.hpp"

namespace herit {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string strip(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(strip(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

struct Columns {
  std::vector<int> index;  // per required name, position in the header

  int operator[](std::size_t i) const { return index[i]; }
};

Columns locate(const std::vector<std::string>& header,
               const std::vector<std::string>& required,
               const std::string& path) {
  Columns cols;
  for (const auto& name : required) {
    const auto it = std::find_if(header.begin(), header.end(),
                                 [&](const std::string& h) {
                                   return lower(h) == name;
                                 });
    if (it == header.end())
      throw data_error(path + ": missing required column '" + name + "'");
    cols.index.push_back(static_cast<int>(it - header.begin()));
  }
  return cols;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open " + path);
  return in;
}

std::string field_or_empty(const std::vector<std::string>& fields, int idx) {
  return idx < static_cast<int>(fields.size()) ? fields[idx] : std::string();
}

}  // namespace

TwinDataset read_twins(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) throw data_error(path + ": empty file");
  const Columns cols = locate(split_csv(line), {"y1", "y2", "zygosity"}, path);

  TwinDataset data;
  while (std::getline(in, line)) {
    if (strip(line).empty()) continue;
    const auto fields = split_csv(line);
    const auto y1 = parse_number(field_or_empty(fields, cols[0]));
    const auto y2 = parse_number(field_or_empty(fields, cols[1]));
    const std::string zyg = lower(field_or_empty(fields, cols[2]));
    if (!y1 || !y2 || (zyg != "mz" && zyg != "dz")) {
      ++data.dropped;
      continue;
    }
    data.records.push_back({*y1, *y2, zyg == "mz"});
  }
  if (data.records.empty()) throw data_error(path + ": no usable rows");
  return data;
}

TrioDataset read_trios(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) throw data_error(path + ": empty file");
  const Columns cols = locate(split_csv(line), {"mother", "father", "child"}, path);

  TrioDataset data;
  while (std::getline(in, line)) {
    if (strip(line).empty()) continue;
    const auto fields = split_csv(line);
    const auto mother = parse_number(field_or_empty(fields, cols[0]));
    const auto father = parse_number(field_or_empty(fields, cols[1]));
    const auto child = parse_number(field_or_empty(fields, cols[2]));
    if (!mother || !father || !child) {
      ++data.dropped;
      continue;
    }
    data.records.push_back({*mother, *father, *child});
  }
  if (data.records.empty()) throw data_error(path + ": no usable rows");
  return data;
}

TrioDataset standardize_trios(TrioDataset data) {
  if (data.records.empty()) throw data_error("cannot standardize an empty dataset");
  double mother_mean = 0.0, father_mean = 0.0;
  for (const auto& r : data.records) {
    mother_mean += r.mother;
    father_mean += r.father;
  }
  const double n = static_cast<double>(data.records.size());
  mother_mean /= n;
  father_mean /= n;
  const double shift = 0.5 * (mother_mean - father_mean);
  for (auto& r : data.records) {
    r.mother -= shift;
    r.father += shift;
  }
  data.standardized = true;
  data.shift = shift;
  return data;
}

TwinData TwinDataset::to_matrices() const {
  Eigen::Index n_mz = 0;
  for (const auto& r : records) n_mz += r.mz ? 1 : 0;
  TwinData out;
  out.mz.resize(n_mz, 2);
  out.dz.resize(static_cast<Eigen::Index>(records.size()) - n_mz, 2);
  Eigen::Index i_mz = 0, i_dz = 0;
  for (const auto& r : records) {
    if (r.mz) {
      out.mz(i_mz, 0) = r.y1;
      out.mz(i_mz, 1) = r.y2;
      ++i_mz;
    } else {
      out.dz(i_dz, 0) = r.y1;
      out.dz(i_dz, 1) = r.y2;
      ++i_dz;
    }
  }
  return out;
}

TrioData TrioDataset::to_matrices() const {
  TrioData out;
  out.values.resize(static_cast<Eigen::Index>(records.size()), 3);
  for (std::size_t i = 0; i < records.size(); ++i) {
    out.values(static_cast<Eigen::Index>(i), 0) = records[i].mother;
    out.values(static_cast<Eigen::Index>(i), 1) = records[i].father;
    out.values(static_cast<Eigen::Index>(i), 2) = records[i].child;
  }
  return out;
}

}  // namespace herit
