#include "evtlearn/csv.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace evtlearn {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::optional<double> parse_double(std::string_view text) {
  double v = 0.0;
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

Dataset parse_csv(std::istream& in, const CsvSchema& schema) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty file: missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_line(line);
  for (auto& h : header) h = trim(h);

  const auto find_column = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::runtime_error("missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t none = header.size();
  const std::size_t target_col = schema.target ? find_column(*schema.target) : none;
  const std::size_t label_col = schema.label ? find_column(*schema.label) : none;

  std::vector<std::size_t> covariates;
  Dataset data;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == target_col || c == label_col) continue;
    covariates.push_back(c);
    data.columns.push_back(header[c]);
  }
  if (schema.target) data.target_name = *schema.target;
  if (schema.label) data.label_name = *schema.label;

  std::vector<double> values;
  std::vector<double> targets;
  std::vector<int> labels;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const auto fields = split_line(line);
    if (fields.size() != header.size()) {
      throw std::runtime_error("row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                               " fields, got " + std::to_string(fields.size()));
    }
    const auto number = [&](std::size_t c) {
      const auto v = parse_double(trim(fields[c]));
      if (!v) {
        throw std::runtime_error("row " + std::to_string(row) + ", column '" + header[c] + "': non-numeric value '" +
                                 fields[c] + "'");
      }
      return *v;
    };
    for (auto c : covariates) values.push_back(number(c));
    if (target_col != none) targets.push_back(number(target_col));
    if (label_col != none) {
      const double v = number(label_col);
      if (v != 1.0 && v != -1.0) {
        throw std::runtime_error("row " + std::to_string(row) + ", column '" + header[label_col] +
                                 "': label must be -1 or 1");
      }
      labels.push_back(static_cast<int>(v));
    }
  }
  if (row == 0) throw std::runtime_error("no data rows");

  const auto d = static_cast<Eigen::Index>(covariates.size());
  data.x = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), static_cast<Eigen::Index>(row), d);
  if (target_col != none) data.target = Eigen::Map<const Eigen::VectorXd>(targets.data(), static_cast<Eigen::Index>(row));
  if (label_col != none) data.labels = std::move(labels);
  return data;
}

Dataset ingest_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return parse_csv(in, schema);
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << fields[i];
  }
  out << '\n';
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  std::vector<std::string> header;
  for (std::size_t j = 0; j < data.d(); ++j) {
    header.push_back(j < data.columns.size() ? data.columns[j] : "x" + std::to_string(j + 1));
  }
  if (data.target) header.push_back(data.target_name);
  if (data.labels) header.push_back(data.label_name);
  write_csv_row(out, header);
  std::vector<std::string> fields;
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    fields.clear();
    for (Eigen::Index j = 0; j < data.x.cols(); ++j) fields.push_back(format_double(data.x(i, j)));
    if (data.target) fields.push_back(format_double((*data.target)(i)));
    if (data.labels) fields.push_back(std::to_string((*data.labels)[static_cast<std::size_t>(i)]));
    write_csv_row(out, fields);
  }
}

}  // namespace evtlearn
