#include "subscan/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace subscan {

namespace {

std::vector<std::string> default_node_ids(Index cols) {
  std::vector<std::string> ids;
  for (Index c = 0; c < cols; ++c) ids.push_back("n" + std::to_string(c));
  return ids;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::optional<double> parse_real(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return value;
}

struct ParsedMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> node_ids;
  std::vector<std::string> sample_ids;
};

ParsedMatrix parse_matrix(const CsvTable& table, const std::filesystem::path& path) {
  const std::string where = path.string() + ": ";
  if (table.header.empty() || (table.header.size() == 1 && table.header[0].empty()))
    throw FormatError(where + "missing header row", 0);
  const bool has_ids = table.header.front() == "sample_id";
  const std::size_t offset = has_ids ? 1 : 0;
  std::vector<std::string> node_ids(table.header.begin() + static_cast<std::ptrdiff_t>(offset),
                                    table.header.end());
  if (node_ids.empty()) throw FormatError(where + "header has no node columns", 0);
  {
    std::unordered_set<std::string> seen;
    for (const auto& id : node_ids) {
      if (id.empty()) throw FormatError(where + "empty node id in header", 0);
      if (!seen.insert(id).second) throw FormatError(where + "duplicate node id '" + id + "'", 0, id);
    }
  }
  if (table.rows.empty()) throw FormatError(where + "no data rows");

  ParsedMatrix out;
  out.values.resize(static_cast<Index>(table.rows.size()), static_cast<Index>(node_ids.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& fields = table.rows[r];
    const auto row = static_cast<Index>(r + 1);
    if (fields.size() != table.header.size())
      throw FormatError(where + "row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                            " fields, header has " + std::to_string(table.header.size()) + " (ragged row)",
                        row);
    if (has_ids) out.sample_ids.push_back(fields[0]);
    for (std::size_t c = 0; c < node_ids.size(); ++c) {
      const auto& cell = fields[c + offset];
      const auto value = parse_real(cell);
      if (!value)
        throw FormatError(where + "row " + std::to_string(row) + ", column '" + node_ids[c] +
                              "': non-numeric value '" + cell + "'",
                          row, node_ids[c]);
      if (!std::isfinite(*value))
        throw FormatError(where + "row " + std::to_string(row) + ", column '" + node_ids[c] +
                              "': non-finite value '" + cell + "'",
                          row, node_ids[c]);
      out.values(row - 1, static_cast<Index>(c)) = *value;
    }
  }
  out.node_ids = std::move(node_ids);
  return out;
}

template <typename Cell>
std::string format_table(const std::vector<std::string>& node_ids,
                         const std::vector<std::string>& sample_ids, Index rows, Index cols,
                         Cell&& cell, const std::string& preamble) {
  std::string out = preamble;
  if (!sample_ids.empty()) out += "sample_id,";
  for (Index c = 0; c < cols; ++c) {
    if (c > 0) out += ',';
    out += node_ids[static_cast<std::size_t>(c)];
  }
  out += '\n';
  for (Index r = 0; r < rows; ++r) {
    if (!sample_ids.empty()) {
      out += sample_ids[static_cast<std::size_t>(r)];
      out += ',';
    }
    for (Index c = 0; c < cols; ++c) {
      if (c > 0) out += ',';
      out += format_real(cell(r, c));
    }
    out += '\n';
  }
  return out;
}

}  // namespace

PValueMatrix::PValueMatrix(Eigen::MatrixXi ranks, int z, std::vector<std::string> node_ids,
                           std::vector<std::string> sample_ids)
    : ranks_(std::move(ranks)), z_(z), node_ids_(std::move(node_ids)), sample_ids_(std::move(sample_ids)) {
  if (z_ < 1) throw std::invalid_argument("p-value matrix needs z >= 1");
  if (ranks_.rows() < 1 || ranks_.cols() < 1)
    throw std::invalid_argument("p-value matrix needs at least one row and one column");
  if (node_ids_.empty()) node_ids_ = default_node_ids(ranks_.cols());
  if (static_cast<Index>(node_ids_.size()) != ranks_.cols())
    throw std::invalid_argument("node_ids length does not match column count");
  if (!sample_ids_.empty() && static_cast<Index>(sample_ids_.size()) != ranks_.rows())
    throw std::invalid_argument("sample_ids length does not match row count");
  if (ranks_.minCoeff() < 1 || ranks_.maxCoeff() > z_ + 1)
    throw std::invalid_argument("p-value outside [1/(z+1), 1]");
}

PValueMatrix PValueMatrix::from_pvalues(const Eigen::MatrixXd& pvalues, int z,
                                        std::vector<std::string> node_ids,
                                        std::vector<std::string> sample_ids) {
  if (z < 1) throw std::invalid_argument("p-value matrix needs z >= 1");
  Eigen::MatrixXi ranks(pvalues.rows(), pvalues.cols());
  const double scale = static_cast<double>(z) + 1.0;
  for (Index r = 0; r < pvalues.rows(); ++r) {
    for (Index c = 0; c < pvalues.cols(); ++c) {
      const double scaled = pvalues(r, c) * scale;
      const double k = std::round(scaled);
      if (!std::isfinite(scaled) || std::abs(scaled - k) > 1e-9 * scale || k < 1 || k > scale)
        throw std::invalid_argument("row " + std::to_string(r + 1) + ", column " + std::to_string(c) +
                                    ": p-value " + format_real(pvalues(r, c)) + " is not on the 1/(z+1) grid");
      ranks(r, c) = static_cast<int>(k);
    }
  }
  return PValueMatrix(std::move(ranks), z, std::move(node_ids), std::move(sample_ids));
}

PValueMatrix PValueMatrix::select_rows(std::span<const Index> rows) const {
  Eigen::MatrixXi out(static_cast<Index>(rows.size()), cols());
  std::vector<std::string> ids;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] < 0 || rows[k] >= this->rows()) throw std::out_of_range("row index out of range");
    out.row(static_cast<Index>(k)) = ranks_.row(rows[k]);
    if (has_sample_ids()) ids.push_back(sample_ids_[static_cast<std::size_t>(rows[k])]);
  }
  return PValueMatrix(std::move(out), z_, node_ids_, std::move(ids));
}

std::optional<std::string> CsvTable::comment(std::string_view key) const {
  for (const auto& [k, v] : comments)
    if (k == key) return v;
  return std::nullopt;
}

CsvTable read_csv_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path.string() + ": cannot open file");
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    const auto view = trim(line);
    if (view.empty()) continue;
    if (!have_header && view.front() == '#') {
      auto body = trim(view.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string_view::npos)
        table.comments.emplace_back(std::string(trim(body.substr(0, eq))), std::string(trim(body.substr(eq + 1))));
      continue;
    }
    if (!have_header) {
      table.header = split_fields(view);
      have_header = true;
    } else {
      table.rows.push_back(split_fields(view));
    }
  }
  if (!have_header) throw FormatError(path.string() + ": empty file", 0);
  return table;
}

ActivationMatrix load_activation_matrix(const std::filesystem::path& path) {
  auto parsed = parse_matrix(read_csv_table(path), path);
  return ActivationMatrix(std::move(parsed.values), std::move(parsed.node_ids), std::move(parsed.sample_ids));
}

PValueMatrix load_pvalue_matrix(const std::filesystem::path& path) {
  const auto table = read_csv_table(path);
  const auto z_text = table.comment("z");
  if (!z_text) throw FormatError(path.string() + ": missing '# z=<int>' line", 0);
  int z = 0;
  const auto [ptr, ec] = std::from_chars(z_text->data(), z_text->data() + z_text->size(), z);
  if (ec != std::errc() || ptr != z_text->data() + z_text->size() || z < 1)
    throw FormatError(path.string() + ": invalid z '" + *z_text + "'", 0);
  auto parsed = parse_matrix(table, path);
  try {
    return PValueMatrix::from_pvalues(parsed.values, z, std::move(parsed.node_ids), std::move(parsed.sample_ids));
  } catch (const std::invalid_argument& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string format_real(double value) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw std::runtime_error("format_real: conversion failed");
  return std::string(buffer, ptr);
}

std::string format_matrix(const ActivationMatrix& m) {
  return format_table(m.node_ids(), m.sample_ids(), m.rows(), m.cols(),
                      [&](Index r, Index c) { return m.values()(r, c); }, {});
}

std::string format_matrix(const PValueMatrix& m) {
  return format_table(m.node_ids(), m.sample_ids(), m.rows(), m.cols(),
                      [&](Index r, Index c) { return m(r, c); }, "# z=" + std::to_string(m.z()) + "\n");
}

void save_matrix(const ActivationMatrix& matrix, const std::filesystem::path& path) {
  write_file_atomically(path, format_matrix(matrix));
}

void save_matrix(const PValueMatrix& matrix, const std::filesystem::path& path) {
  write_file_atomically(path, format_matrix(matrix));
}

void write_file_atomically(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw std::runtime_error(path.string() + ": write failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error(path.string() + ": cannot rename temporary file");
  }
}

}  // namespace subscan
