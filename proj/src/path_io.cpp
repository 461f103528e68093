#include "roughlift/path_io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "roughlift/error.hpp"

namespace roughlift {

namespace {

// Relative to the step; admits times printed with about six significant digits.
constexpr double kSpacingTolerance = 1e-3;

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& text, double& value) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string::npos) return false;
  const char* begin = text.c_str() + first;
  char* end = nullptr;
  errno = 0;
  value = std::strtod(begin, &end);
  if (end == begin || errno == ERANGE) return false;
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  return *end == '\0';
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct Table {
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> line_numbers;
  std::vector<std::string> comments;
};

// Numeric rows; a non-numeric first data line is treated as the header.
Table read_table(std::istream& in) {
  Table table;
  std::string line;
  std::size_t line_no = 0;
  bool header_allowed = true;
  std::size_t columns = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      table.comments.push_back(t);
      continue;
    }
    const auto fields = split(t);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size() && numeric; ++i) numeric = parse_double(fields[i], row[i]);
    if (!numeric) {
      if (header_allowed) {
        header_allowed = false;
        columns = fields.size();
        continue;
      }
      throw Error(ErrorCode::ParseError, "row " + std::to_string(line_no) + ": non-numeric field");
    }
    header_allowed = false;
    if (columns == 0) columns = row.size();
    if (row.size() != columns)
      throw Error(ErrorCode::ParseError, "row " + std::to_string(line_no) + ": expected " +
                                             std::to_string(columns) + " columns, found " +
                                             std::to_string(row.size()));
    for (const double v : row)
      if (!std::isfinite(v)) throw Error(ErrorCode::ParseError, "row " + std::to_string(line_no) + ": non-finite value");
    table.rows.push_back(std::move(row));
    table.line_numbers.push_back(line_no);
  }
  return table;
}

void check_uniform(const Table& table) {
  const auto& rows = table.rows;
  const double step = rows[1][0] - rows[0][0];
  if (!(step > 0.0)) throw Error(ErrorCode::ParseError, "row " + std::to_string(table.line_numbers[1]) + ": times must increase");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double d = rows[i][0] - rows[i - 1][0];
    if (std::abs(d - step) > kSpacingTolerance * step)
      throw Error(ErrorCode::ParseError, "row " + std::to_string(table.line_numbers[i]) +
                                             ": non-uniform time spacing");
  }
}

int exact_dyadic_level(std::size_t cells) {
  if (cells == 0 || (cells & (cells - 1)) != 0) return -1;
  int level = 0;
  while ((std::size_t{1} << level) < cells) ++level;
  return level;
}

std::ofstream open_out(const std::string& file) {
  std::ofstream out(file);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + file + "' for writing");
  out << std::setprecision(17);
  return out;
}

std::ifstream open_in(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + file + "'");
  return in;
}

}  // namespace

LoadedPath read_path_csv(std::istream& in) {
  const Table table = read_table(in);
  if (table.rows.size() < 3) throw Error(ErrorCode::ParseError, "need at least 3 data rows");
  if (table.rows.front().size() < 2) throw Error(ErrorCode::ParseError, "need a time column and at least one coordinate");
  check_uniform(table);

  const auto n = table.rows.size();
  const auto d = static_cast<Eigen::Index>(table.rows.front().size() - 1);
  Resampling info;
  info.original_samples = static_cast<Eigen::Index>(n);
  info.original_t0 = table.rows.front()[0];
  info.original_t1 = table.rows.back()[0];

  const int exact = exact_dyadic_level(n - 1);
  if (exact >= 2 && exact <= kMaxGridLevel) {
    Eigen::MatrixXd values(static_cast<Eigen::Index>(n), d);
    for (std::size_t i = 0; i < n; ++i)
      for (Eigen::Index c = 0; c < d; ++c) values(static_cast<Eigen::Index>(i), c) = table.rows[i][static_cast<std::size_t>(c) + 1];
    info.level = exact;
    return LoadedPath{SampledPath(std::move(values), 0.0, 1.0, exact), info};
  }

  const int level = std::clamp(static_cast<int>(std::lround(std::log2(static_cast<double>(n - 1)))), 2, kMaxGridLevel);
  const Eigen::Index samples = (Eigen::Index{1} << level) + 1;
  Eigen::MatrixXd values(samples, d);
  const double cells = static_cast<double>(n - 1);
  for (Eigen::Index i = 0; i < samples; ++i) {
    const double u = std::ldexp(static_cast<double>(i), -level) * cells;
    const auto j = std::min(static_cast<std::size_t>(u), n - 2);
    const double w = u - static_cast<double>(j);
    for (Eigen::Index c = 0; c < d; ++c) {
      const auto col = static_cast<std::size_t>(c) + 1;
      values(i, c) = (1.0 - w) * table.rows[j][col] + w * table.rows[j + 1][col];
    }
  }
  info.resampled = true;
  info.level = level;
  return LoadedPath{SampledPath(std::move(values), 0.0, 1.0, level), info};
}

LoadedPath load_path_csv(const std::string& file) {
  auto in = open_in(file);
  return read_path_csv(in);
}

void write_path_csv(const SampledPath& path, std::ostream& out) {
  out << "t";
  for (Eigen::Index c = 0; c < path.dim(); ++c) out << ",x_" << c + 1;
  out << '\n';
  for (Eigen::Index i = 0; i < path.samples(); ++i) {
    out << path.time(i);
    for (Eigen::Index c = 0; c < path.dim(); ++c) out << ',' << path.values()(i, c);
    out << '\n';
  }
}

void save_path_csv(const SampledPath& path, const std::string& file) {
  auto out = open_out(file);
  write_path_csv(path, out);
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + file + "'");
}

void write_group_path_csv(const GroupPath& path, const GroupPathMeta& meta, std::ostream& out) {
  const Eigen::Index d = path.dim();
  out << "# roughlift group-path";
  for (const auto& [key, value] : meta) out << ' ' << key << '=' << value;
  out << "\nt";
  for (Eigen::Index c = 0; c < d; ++c) out << ",x_" << c + 1;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) out << ",xx_" << i + 1 << j + 1;
  out << '\n';
  for (Eigen::Index t = 0; t < path.nodes(); ++t) {
    out << path.time(t);
    for (Eigen::Index c = 0; c < d; ++c) out << ',' << path.level1()(t, c);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) out << ',' << path.level2_at(t, i, j);
    out << '\n';
  }
}

void save_group_path_csv(const GroupPath& path, const GroupPathMeta& meta, const std::string& file) {
  auto out = open_out(file);
  write_group_path_csv(path, meta, out);
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + file + "'");
}

LoadedGroupPath read_group_path_csv(std::istream& in) {
  const Table table = read_table(in);
  GroupPathMeta meta;
  for (const auto& comment : table.comments) {
    std::stringstream ss(comment);
    std::string token;
    while (ss >> token) {
      const auto eq = token.find('=');
      if (eq != std::string::npos) meta[token.substr(0, eq)] = token.substr(eq + 1);
    }
  }
  if (table.rows.size() < 2) throw Error(ErrorCode::ParseError, "need at least 2 data rows");
  const auto columns = static_cast<Eigen::Index>(table.rows.front().size());
  Eigen::Index d = 1;
  while (1 + d + d * d < columns) ++d;
  if (1 + d + d * d != columns)
    throw Error(ErrorCode::ParseError, std::to_string(columns) + " columns do not match t, x_1..x_d, xx_11..xx_dd");
  check_uniform(table);

  const auto n = static_cast<Eigen::Index>(table.rows.size());
  const double t0 = table.rows.front()[0];
  const double t1 = table.rows.back()[0];
  const int level = static_cast<int>(std::lround(std::log2(static_cast<double>(n - 1) / (t1 - t0))));
  Eigen::MatrixXd l1(n, d);
  Eigen::MatrixXd l2(n, d * d);
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto& row = table.rows[static_cast<std::size_t>(t)];
    for (Eigen::Index c = 0; c < d; ++c) l1(t, c) = row[static_cast<std::size_t>(1 + c)];
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) l2(t, j * d + i) = row[static_cast<std::size_t>(1 + d + i * d + j)];
  }
  return LoadedGroupPath{GroupPath(std::move(l1), std::move(l2), t0, t1, level), std::move(meta)};
}

LoadedGroupPath load_group_path_csv(const std::string& file) {
  auto in = open_in(file);
  return read_group_path_csv(in);
}

}  // namespace roughlift
