#include "invms/simulate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "invms/error.hpp"

namespace invms {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_cdf_maxstable(const ExponentFamily& fam, double y, double x) {
  double d1;
  try {
    d1 = v1(fam, x, y);
  } catch (const BoundaryError&) {
    y = std::nextafter(y, kInf);
    d1 = v1(fam, x, y);
  }
  if (!(d1 < 0.0)) return -kInf;
  return std::log(-d1) + 2.0 * std::log(x) - v(fam, x, y) + 1.0 / x;
}

std::string trim(std::string s) {
  const auto notspace = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
  return s;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::vector<double> SampleSet::xs() const {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.first);
  return out;
}

std::vector<double> SampleSet::ys() const {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.second);
  return out;
}

double conditional_cdf_maxstable(const ExponentFamily& fam, double y, double given_xf) {
  if (!(given_xf > 0.0) || !(y >= 0.0)) throw DomainError("conditional_cdf: need x > 0, y >= 0");
  if (y == 0.0) return 0.0;
  if (std::isinf(y)) return 1.0;
  return std::min(1.0, std::exp(log_cdf_maxstable(fam, y, given_xf)));
}

SampleSet sample(const ExponentFamily& fam, std::size_t n, RandomStream& stream) {
  if (n == 0) throw DomainError("sample: n must be >= 1");
  SampleSet out{{}, fam, stream.seed(), stream.stream_index()};
  out.pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u1 = stream.uniform();
    const double u2 = stream.uniform();
    const double x = -std::log(u1);  // unit exponential, X_F = 1 / x
    const double xf = 1.0 / x;
    const double target = std::log(u2);
    // An underflowed V_1 gives -inf far below any target; keep Brent's values finite.
    auto f = [&](double t) {
      return std::max(log_cdf_maxstable(fam, std::exp(t), xf), -1e300) - target;
    };

    // f increases in t = log y_F.
    double lo = std::log(xf) - 2.0, hi = std::log(xf) + 2.0;
    double step = 2.0;
    int guard = 0;
    while (f(lo) > 0.0) {
      hi = lo;
      lo -= step;
      step *= 2.0;
      if (++guard > 60 || lo < -700.0) {
        throw NumericError("sample: no lower bracket at draw " + std::to_string(i) +
                           " (x = " + std::to_string(x) + ", u = " + std::to_string(u2) + ")");
      }
    }
    step = 2.0;
    guard = 0;
    while (f(hi) < 0.0) {
      lo = std::max(lo, hi);
      hi += step;
      step *= 2.0;
      if (++guard > 60 || hi > 700.0) {
        throw NumericError("sample: no upper bracket at draw " + std::to_string(i) +
                           " (x = " + std::to_string(x) + ", u = " + std::to_string(u2) + ")");
      }
    }
    const double t = find_root(f, lo, hi, 1e-10);
    out.pairs.emplace_back(x, std::exp(-t));
  }
  return out;
}

std::vector<SampleSet> replicate(const ExponentFamily& fam, std::size_t n, std::size_t reps,
                                 std::uint64_t base_seed) {
  if (reps == 0) throw DomainError("replicate: reps must be >= 1");
  std::vector<SampleSet> out;
  out.reserve(reps);
  for (std::size_t k = 0; k < reps; ++k) {
    RandomStream stream(base_seed, k);
    out.push_back(sample(fam, n, stream));
  }
  return out;
}

std::string to_csv(const std::vector<Pair>& pairs) {
  std::string out = "x,y\n";
  out.reserve(pairs.size() * 40 + 4);
  char buf[96];
  for (const auto& [x, y] : pairs) {
    std::snprintf(buf, sizeof buf, "%.15g,%.15g\n", x, y);
    out += buf;
  }
  return out;
}

std::vector<Pair> pairs_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_commas(line);
  int ix = -1, iy = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "x") ix = int(i);
    if (header[i] == "y") iy = int(i);
  }
  if (ix < 0 || iy < 0) throw DataError("csv: header must name columns 'x' and 'y'");
  std::vector<Pair> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != header.size())
      throw DataError("csv: line " + std::to_string(lineno) + " has " +
                      std::to_string(cells.size()) + " fields, expected " +
                      std::to_string(header.size()));
    double vals[2];
    const int idx[2] = {ix, iy};
    for (int j = 0; j < 2; ++j) {
      const std::string& c = cells[std::size_t(idx[j])];
      std::size_t used = 0;
      try {
        vals[j] = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != c.size() || !std::isfinite(vals[j]))
        throw DataError("csv: line " + std::to_string(lineno) + ": bad number '" + c + "'");
    }
    out.emplace_back(vals[0], vals[1]);
  }
  if (out.empty()) throw DataError("csv: no data rows");
  return out;
}

}  // namespace invms
