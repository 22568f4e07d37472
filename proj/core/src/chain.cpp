#include "mcov/chain.hpp"

#include <bit>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "mcov/errors.hpp"

namespace mcov {

namespace {

constexpr char kRawMagic[4] = {'M', 'C', 'O', 'V'};

static_assert(std::endian::native == std::endian::little,
              "raw-f64 chain format assumes a little-endian host");

bool parse_double(std::string_view field, double& out) {
  // std::from_chars for doubles is available in libstdc++ >= 11.
  const char* first = field.data();
  const char* last = field.data() + field.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  while (last != first && (*(last - 1) == ' ' || *(last - 1) == '\t')) --last;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && first != last;
}

ChainMatrix load_csv(const std::filesystem::path& path, std::size_t skip_first) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open chain file: " + path.string());

  std::vector<double> data;
  std::size_t p = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::string line;
  bool first_content_line = true;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<double> row;
    std::size_t start = 0;
    bool bad_field = false;
    while (true) {
      std::size_t comma = line.find(',', start);
      std::string_view field(line.data() + start,
                             (comma == std::string::npos ? line.size() : comma) - start);
      double v;
      if (!parse_double(field, v)) {
        bad_field = true;
        break;
      }
      row.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }

    if (bad_field) {
      if (first_content_line) {
        first_content_line = false;  // single header line, by detection
        continue;
      }
      throw IoError("parse error in " + path.string() + " at line " + std::to_string(line_no));
    }
    first_content_line = false;

    if (p == 0) {
      p = row.size();
    } else if (row.size() != p) {
      throw IoError("dimension error in " + path.string() + " at line " + std::to_string(line_no) +
                    ": expected " + std::to_string(p) + " columns, got " +
                    std::to_string(row.size()));
    }
    data.insert(data.end(), row.begin(), row.end());
    ++rows;
  }

  if (rows == 0) throw IoError("no rows in chain file: " + path.string());
  if (skip_first >= rows)
    throw IoError("skip-first " + std::to_string(skip_first) + " leaves no rows (file has " +
                  std::to_string(rows) + ")");
  if (skip_first > 0) {
    data.erase(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(skip_first * p));
    rows -= skip_first;
  }
  return ChainMatrix(rows, p, std::move(data));
}

ChainMatrix load_raw(const std::filesystem::path& path, std::size_t skip_first) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open chain file: " + path.string());

  char header[16];
  if (!in.read(header, sizeof header))
    throw IoError("raw-f64 header truncated: " + path.string());
  if (std::memcmp(header, kRawMagic, 4) != 0)
    throw IoError("raw-f64 magic mismatch (expected MCOV): " + path.string());

  std::uint32_t n32, p32;
  std::memcpy(&n32, header + 4, 4);
  std::memcpy(&p32, header + 8, 4);
  if (n32 == 0 || p32 == 0) throw IoError("no rows in chain file: " + path.string());

  std::size_t count = static_cast<std::size_t>(n32) * p32;
  std::vector<double> data(count);
  if (!in.read(reinterpret_cast<char*>(data.data()),
               static_cast<std::streamsize>(count * sizeof(double))))
    throw IoError("raw-f64 payload truncated: " + path.string());

  if (skip_first >= n32)
    throw IoError("skip-first " + std::to_string(skip_first) + " leaves no rows (file has " +
                  std::to_string(n32) + ")");
  if (skip_first > 0) {
    data.erase(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(skip_first * p32));
    n32 -= static_cast<std::uint32_t>(skip_first);
  }
  return ChainMatrix(n32, p32, std::move(data));
}

}  // namespace

ChainMatrix::ChainMatrix(std::size_t n, std::size_t p, std::vector<double> row_major)
    : n_(n), p_(p), data_(std::move(row_major)) {
  if (n_ < 1 || p_ < 1) throw IoError("chain requires n >= 1 and p >= 1");
  if (data_.size() != n_ * p_) throw IoError("chain storage size mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) {
    if (!std::isfinite(data_[k]))
      throw IoError("non-finite chain entry at row " + std::to_string(k / p_) + ", column " +
                    std::to_string(k % p_));
  }
}

ChainMatrix ChainMatrix::prefix(std::size_t m) const {
  if (m < 1 || m > n_) throw ConfigError("prefix length out of range");
  return ChainMatrix(m, p_, std::vector<double>(data_.begin(),
                                                data_.begin() + static_cast<std::ptrdiff_t>(m * p_)));
}

Vector ChainMatrix::column_mean() const {
  Vector mean(p_, 0.0);
  for (std::size_t t = 0; t < n_; ++t) {
    const double* r = data_.data() + t * p_;
    for (std::size_t i = 0; i < p_; ++i) mean[i] += r[i];
  }
  for (double& v : mean) v /= static_cast<double>(n_);
  return mean;
}

ChainMatrix load_chain(const std::filesystem::path& path, ChainFormat format,
                       std::size_t skip_first) {
  if (!std::filesystem::exists(path)) throw IoError("chain file does not exist: " + path.string());
  return format == ChainFormat::kCsv ? load_csv(path, skip_first) : load_raw(path, skip_first);
}

void save_chain(const ChainMatrix& chain, const std::filesystem::path& path, ChainFormat format) {
  if (format == ChainFormat::kCsv) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write chain file: " + path.string());
    char buf[40];
    std::string line;
    for (std::size_t t = 0; t < chain.n(); ++t) {
      line.clear();
      auto r = chain.row(t);
      for (std::size_t i = 0; i < chain.p(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", r[i]);
        if (i) line += ',';
        line += buf;
      }
      line += '\n';
      out << line;
    }
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write chain file: " + path.string());
  char header[16] = {};
  std::memcpy(header, kRawMagic, 4);
  std::uint32_t n32 = static_cast<std::uint32_t>(chain.n());
  std::uint32_t p32 = static_cast<std::uint32_t>(chain.p());
  std::memcpy(header + 4, &n32, 4);
  std::memcpy(header + 8, &p32, 4);
  out.write(header, sizeof header);
  out.write(reinterpret_cast<const char*>(chain.values().data()),
            static_cast<std::streamsize>(chain.values().size() * sizeof(double)));
}

MeanAndScatter summarize(const ChainMatrix& chain) {
  const std::size_t n = chain.n();
  const std::size_t p = chain.p();
  if (n < 2) throw ConfigError("summarize: sample covariance requires n >= 2");

  MeanAndScatter out;
  out.mean = chain.column_mean();
  out.sample_cov = Matrix(p, p);
  Vector z(p);
  for (std::size_t t = 0; t < n; ++t) {
    auto r = chain.row(t);
    for (std::size_t i = 0; i < p; ++i) z[i] = r[i] - out.mean[i];
    add_scaled_outer(out.sample_cov, 1.0, z, z);
  }
  out.sample_cov *= 1.0 / static_cast<double>(n - 1);
  out.sample_cov.symmetrize();
  return out;
}

std::vector<double> acf_ccf(const ChainMatrix& chain, std::size_t i, std::size_t j,
                            std::size_t max_lag) {
  const std::size_t n = chain.n();
  if (i >= chain.p() || j >= chain.p()) throw ConfigError("acf_ccf: coordinate out of range");
  if (max_lag >= n) throw ConfigError("acf_ccf: max_lag must be < n");

  Vector mean = chain.column_mean();
  double var_i = 0.0, var_j = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    double zi = chain(t, i) - mean[i];
    double zj = chain(t, j) - mean[j];
    var_i += zi * zi;
    var_j += zj * zj;
  }
  var_i /= static_cast<double>(n);
  var_j /= static_cast<double>(n);
  if (var_i <= 0.0 || var_j <= 0.0)
    throw NumericError("acf_ccf: zero-variance coordinate");

  double denom = std::sqrt(var_i * var_j);
  std::vector<double> corr(max_lag + 1);
  for (std::size_t s = 0; s <= max_lag; ++s) {
    double acc = 0.0;
    for (std::size_t t = 0; t + s < n; ++t)
      acc += (chain(t, i) - mean[i]) * (chain(t + s, j) - mean[j]);
    corr[s] = acc / static_cast<double>(n) / denom;
  }
  return corr;
}

}  // namespace mcov
