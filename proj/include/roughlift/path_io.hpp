#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "roughlift/nilpotent_group.hpp"
#include "roughlift/path_space.hpp"

namespace roughlift {

/// How an input CSV was mapped onto a dyadic grid of [0, 1].
struct Resampling {
  bool resampled = false;
  Eigen::Index original_samples = 0;
  double original_t0 = 0.0;
  double original_t1 = 1.0;
  int level = 0;
};

struct LoadedPath {
  SampledPath path;
  Resampling resampling;
};

/// Reads `t,x_1,...,x_d` rows (header optional, '#' lines skipped). Times
/// must be uniformly spaced and are mapped affinely onto [0, 1]; unless the
/// sample count is already 2^M + 1 the path is linearly resampled at
/// M = round(log2(rows - 1)), clamped to [2, 14]. Throws ParseError.
LoadedPath read_path_csv(std::istream& in);
LoadedPath load_path_csv(const std::string& file);

void write_path_csv(const SampledPath& path, std::ostream& out);
void save_path_csv(const SampledPath& path, const std::string& file);

/// Key/value pairs stored on the leading "# roughlift group-path" line.
using GroupPathMeta = std::map<std::string, std::string>;

/// Columns t, x_1..x_d, xx_11, xx_12, ..., xx_dd (row-major pairs).
void write_group_path_csv(const GroupPath& path, const GroupPathMeta& meta, std::ostream& out);
void save_group_path_csv(const GroupPath& path, const GroupPathMeta& meta, const std::string& file);

struct LoadedGroupPath {
  GroupPath path;
  GroupPathMeta meta;
};

LoadedGroupPath read_group_path_csv(std::istream& in);
LoadedGroupPath load_group_path_csv(const std::string& file);

}  // namespace roughlift
