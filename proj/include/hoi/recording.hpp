#pragma once

// Multichannel recordings: CSV ingest, z-scoring, and dataset manifests.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "hoi/errors.hpp"

namespace hoi {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// C channels by T timepoints. Rows are channels and are contiguous in memory.
struct Recording {
  RowMatrix data;
  std::string subject_id;

  std::size_t channels() const { return static_cast<std::size_t>(data.rows()); }
  std::size_t timepoints() const { return static_cast<std::size_t>(data.cols()); }

  Eigen::Map<const Eigen::VectorXd> channel(std::size_t c) const {
    return {data.row(static_cast<Eigen::Index>(c)).data(), data.cols()};
  }
};

enum class Orientation { RowsAreChannels, RowsAreTimepoints };

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

// Parses a whole cell as a finite decimal number.
inline std::optional<double> parse_number(std::string_view cell) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace detail

/// Parses CSV text into canonical C x T layout. Row and column numbers in
/// ParseError are 0-based positions in the text, counting a header row.
/// Blank lines are ignored. A first row in which no cell is numeric is a header.
inline Recording parse_csv(std::string_view text, Orientation orientation) {
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      lines.push_back(text.substr(start, end - start));
      start = end + 1;
    }
  }

  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  bool first = true;
  for (std::size_t r = 0; r < lines.size(); ++r) {
    if (detail::trim(lines[r]).empty()) continue;
    const auto cells = detail::split_commas(lines[r]);
    if (first) {
      first = false;
      const bool any_numeric = std::any_of(cells.begin(), cells.end(), [](std::string_view c) {
        return detail::parse_number(c).has_value();
      });
      if (!any_numeric) continue;
    }
    if (rows.empty()) {
      width = cells.size();
    } else if (cells.size() != width) {
      throw ParseError(r, ParseError::npos,
                       "row " + std::to_string(r) + " has " + std::to_string(cells.size()) +
                           " cells, expected " + std::to_string(width));
    }
    std::vector<double> values(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto v = detail::parse_number(cells[c]);
      if (!v) {
        throw ParseError(r, c, "cell (" + std::to_string(r) + "," + std::to_string(c) +
                                   ") is not a finite number: '" +
                                   std::string(detail::trim(cells[c])) + "'");
      }
      values[c] = *v;
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw EmptyInput("no numeric rows in input");

  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  const auto n_cols = static_cast<Eigen::Index>(width);
  Recording rec;
  if (orientation == Orientation::RowsAreChannels) {
    rec.data.resize(n_rows, n_cols);
    for (Eigen::Index i = 0; i < n_rows; ++i)
      for (Eigen::Index j = 0; j < n_cols; ++j) rec.data(i, j) = rows[i][j];
  } else {
    rec.data.resize(n_cols, n_rows);
    for (Eigen::Index i = 0; i < n_rows; ++i)
      for (Eigen::Index j = 0; j < n_cols; ++j) rec.data(j, i) = rows[i][j];
  }
  return rec;
}

/// Reads a CSV file. subject_id defaults to the file stem.
inline Recording load_csv(const std::filesystem::path& path, Orientation orientation) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  Recording rec = parse_csv(buf.str(), orientation);
  rec.subject_id = path.stem().string();
  return rec;
}

/// Z-scores each channel with the population standard deviation.
/// Throws DegenerateChannel for a channel with zero variance.
inline Recording standardize(const Recording& rec) {
  Recording out = rec;
  const double n = static_cast<double>(rec.timepoints());
  for (Eigen::Index c = 0; c < out.data.rows(); ++c) {
    auto row = out.data.row(c);
    const double mean = row.sum() / n;
    row.array() -= mean;
    const double sd = std::sqrt(row.squaredNorm() / n);
    if (!(sd > 0.0)) throw DegenerateChannel(static_cast<std::size_t>(c));
    row /= sd;
  }
  return out;
}

struct ManifestEntry {
  std::filesystem::path path;
  std::string subject_id;
  int label = 0;
};

struct DatasetManifest {
  std::string schema_version;
  std::vector<ManifestEntry> entries;
};

/// Parses a manifest document. Relative entry paths resolve against base_dir.
/// Throws FormatError for schema violations, duplicate subject ids, or labels
/// that are not a contiguous range starting at 0.
inline DatasetManifest parse_manifest(std::string_view text,
                                      const std::filesystem::path& base_dir = {}) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("manifest is not valid JSON: ") + e.what());
  }
  DatasetManifest m;
  try {
    m.schema_version = doc.at("schema_version").get<std::string>();
    if (m.schema_version != "1") {
      throw FormatError("unsupported manifest schema_version '" + m.schema_version + "'");
    }
    for (const auto& e : doc.at("entries")) {
      ManifestEntry entry;
      entry.path = e.at("path").get<std::string>();
      if (entry.path.is_relative() && !base_dir.empty()) entry.path = base_dir / entry.path;
      entry.subject_id = e.at("subject_id").get<std::string>();
      entry.label = e.at("label").get<int>();
      m.entries.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }

  std::set<std::string> ids;
  std::set<int> labels;
  for (const auto& e : m.entries) {
    if (!ids.insert(e.subject_id).second) {
      throw FormatError("duplicate subject_id '" + e.subject_id + "'");
    }
    labels.insert(e.label);
  }
  if (!labels.empty() &&
      (*labels.begin() != 0 || *labels.rbegin() != static_cast<int>(labels.size()) - 1)) {
    throw FormatError("labels must form a contiguous range 0..K-1");
  }
  return m;
}

inline DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open manifest " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str(), path.parent_path());
}

}  // namespace hoi
