#include <rwre/empirical_dist.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rwre {

namespace {

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

EmpiricalDist EmpiricalDist::from_samples(std::vector<double> samples,
                                          nlohmann::json meta) {
  if (samples.empty()) {
    throw std::invalid_argument("EmpiricalDist: empty sample");
  }
  for (double v : samples) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("EmpiricalDist: non-finite sample value");
    }
  }
  std::sort(samples.begin(), samples.end());
  EmpiricalDist d;
  d.values = std::move(samples);
  d.meta = std::move(meta);
  return d;
}

std::string EmpiricalDist::to_csv() const {
  std::ostringstream out;
  out << "# meta: " << meta.dump() << "\n";
  out << "value\n";
  for (double v : values) out << format_value(v) << "\n";
  return out.str();
}

void EmpiricalDist::write_csv(const std::filesystem::path& path) const {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("EmpiricalDist: cannot open " + tmp.string());
    }
    out << to_csv();
    out.flush();
    if (!out) {
      throw std::runtime_error("EmpiricalDist: write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

EmpiricalDist EmpiricalDist::parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# meta: ", 0) != 0) {
    throw std::invalid_argument("EmpiricalDist: missing '# meta:' header");
  }
  nlohmann::json meta = nlohmann::json::parse(line.substr(8));
  if (!std::getline(in, line) || line != "value") {
    throw std::invalid_argument("EmpiricalDist: missing 'value' column header");
  }
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(line, &used);
    if (used != line.size()) {
      throw std::invalid_argument("EmpiricalDist: bad value line: " + line);
    }
    values.push_back(v);
  }
  if (!std::is_sorted(values.begin(), values.end())) {
    throw std::invalid_argument("EmpiricalDist: values not sorted");
  }
  return from_samples(std::move(values), std::move(meta));
}

EmpiricalDist EmpiricalDist::read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("EmpiricalDist: cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

}  // namespace rwre
