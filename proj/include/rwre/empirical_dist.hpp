#pragma once

// Sorted-sample representation of an empirical probability measure on the
// reals, with a CSV persistence format:
//
//   # meta: {"inner":4000,"max_inner_stderr":...,"n":256,...}
//   value
//   -1.2207180601307953
//   ...
//
// Values are written with 17 significant digits so the file round-trips
// bit-exactly; the meta line is a JSON object.

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace rwre {

struct EmpiricalDist {
  std::vector<double> values;  // sorted ascending, nonempty
  nlohmann::json meta = nlohmann::json::object();

  // Sorts and validates (nonempty, all finite).
  static EmpiricalDist from_samples(std::vector<double> samples,
                                    nlohmann::json meta = nlohmann::json::object());

  std::size_t size() const { return values.size(); }

  // Serializes to the CSV format above (atomically: temp file + rename).
  void write_csv(const std::filesystem::path& path) const;
  std::string to_csv() const;
  static EmpiricalDist read_csv(const std::filesystem::path& path);
  static EmpiricalDist parse_csv(const std::string& text);
};

}  // namespace rwre
