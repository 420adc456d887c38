#include "cgns/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cgns/errors.hpp"

namespace cgns::io {

namespace {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput(path.string() + ": empty file");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto row = split(line);
    if (row.size() != t.header.size()) {
      std::ostringstream os;
      os << path.string() << ": row " << t.rows.size() + 1 << " has " << row.size()
         << " fields, header has " << t.header.size();
      throw InvalidInput(os.str());
    }
    t.rows.push_back(std::move(row));
  }
  if (t.rows.empty()) throw InvalidInput(path.string() + ": no data rows");
  return t;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << text;
  if (!out) throw InvalidInput("failed writing " + path.string());
}

int count_prefixed(const std::vector<std::string>& header, const std::string& prefix,
                   std::size_t start) {
  int n = 0;
  while (start + static_cast<std::size_t>(n) < header.size() &&
         header[start + static_cast<std::size_t>(n)] == prefix + std::to_string(n))
    ++n;
  return n;
}

[[noreturn]] void schema_error(const std::filesystem::path& path, const CsvTable& t,
                               const std::string& expected) {
  std::ostringstream os;
  os << path.string() << ": unexpected columns [";
  for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
  os << "], expected " << expected;
  throw InvalidInput(os.str());
}

std::vector<double> column(const CsvTable& t, std::size_t c, const std::filesystem::path& path) {
  std::vector<double> out(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    out[r] = parse_double(t.rows[r][c], path.string() + " column " + t.header[c]);
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, end);
}

double parse_double(std::string_view text, std::string_view context) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw InvalidInput(std::string(context) + ": cannot parse '" + std::string(text) + "'");
  return v;
}

TimeGrid grid_from_times(const std::vector<double>& times) {
  if (times.empty()) throw InvalidInput("empty time column");
  if (times.size() == 1) {
    TimeGrid g;
    g.t0 = g.t_end = times[0];
    g.dt = 1.0;
    g.n_steps = 0;
    return g;
  }
  const long J = static_cast<long>(times.size()) - 1;
  const double dt = (times.back() - times.front()) / static_cast<double>(J);
  TimeGrid g = TimeGrid::make(times.front(), times.back(), dt);
  for (long j = 0; j <= J; ++j)
    if (std::abs(times[static_cast<std::size_t>(j)] - g.time(j)) > 1e-6 * dt)
      throw InvalidInput("time column is not a uniform grid");
  g.n_steps = J;
  return g;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::string s = "t";
  for (Eigen::Index i = 0; i < traj.x_path.cols(); ++i) s += ",x_" + std::to_string(i);
  for (Eigen::Index i = 0; i < traj.y_path.cols(); ++i) s += ",y_" + std::to_string(i);
  s += '\n';
  for (Eigen::Index j = 0; j < traj.x_path.rows(); ++j) {
    s += format_double(traj.grid.time(j));
    for (Eigen::Index i = 0; i < traj.x_path.cols(); ++i) s += ',' + format_double(traj.x_path(j, i));
    for (Eigen::Index i = 0; i < traj.y_path.cols(); ++i) s += ',' + format_double(traj.y_path(j, i));
    s += '\n';
  }
  write_file(path, s);
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const int k = t.header.empty() || t.header[0] != "t" ? 0 : count_prefixed(t.header, "x_", 1);
  const int l = count_prefixed(t.header, "y_", 1 + static_cast<std::size_t>(k));
  if (k < 1 || static_cast<std::size_t>(1 + k + l) != t.header.size())
    schema_error(path, t, "t,x_0..x_{k-1}[,y_0..y_{l-1}]");
  Trajectory tr;
  tr.grid = grid_from_times(column(t, 0, path));
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  tr.x_path.resize(n, k);
  tr.y_path.resize(n, l);
  for (int i = 0; i < k; ++i) {
    const auto c = column(t, 1 + static_cast<std::size_t>(i), path);
    for (Eigen::Index r = 0; r < n; ++r) tr.x_path(r, i) = c[static_cast<std::size_t>(r)];
  }
  for (int i = 0; i < l; ++i) {
    const auto c = column(t, 1 + static_cast<std::size_t>(k + i), path);
    for (Eigen::Index r = 0; r < n; ++r) tr.y_path(r, i) = c[static_cast<std::size_t>(r)];
  }
  return tr;
}

void write_posterior_csv(const std::filesystem::path& path, const PosteriorSeries& series) {
  const auto l = series.states.empty() ? 0 : series.states.front().mean.size();
  std::string s = "t";
  for (Eigen::Index i = 0; i < l; ++i) s += ",mu_" + std::to_string(i);
  for (Eigen::Index a = 0; a < l; ++a)
    for (Eigen::Index b = a; b < l; ++b) s += ",R_" + std::to_string(a) + std::to_string(b);
  s += ",kind\n";
  const std::string kind = to_string(series.kind);
  for (std::size_t j = 0; j < series.states.size(); ++j) {
    const auto& st = series.states[j];
    s += format_double(series.grid.time(static_cast<long>(j)));
    for (Eigen::Index i = 0; i < l; ++i) s += ',' + format_double(st.mean(i));
    for (Eigen::Index a = 0; a < l; ++a)
      for (Eigen::Index b = a; b < l; ++b) s += ',' + format_double(st.cov(a, b));
    s += ',' + kind + '\n';
  }
  write_file(path, s);
}

PosteriorSeries read_posterior_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const int l = t.header.empty() || t.header[0] != "t" ? 0 : count_prefixed(t.header, "mu_", 1);
  const std::size_t ncov = static_cast<std::size_t>(l * (l + 1) / 2);
  const std::string expected = "t,mu_0..mu_{l-1},R_00,R_01,..,kind";
  if (l < 1 || t.header.size() != 2 + static_cast<std::size_t>(l) + ncov ||
      t.header.back() != "kind")
    schema_error(path, t, expected);
  std::size_t c = 1 + static_cast<std::size_t>(l);
  for (int a = 0; a < l; ++a)
    for (int b = a; b < l; ++b, ++c)
      if (t.header[c] != "R_" + std::to_string(a) + std::to_string(b))
        schema_error(path, t, expected);
  PosteriorSeries ps;
  ps.grid = grid_from_times(column(t, 0, path));
  const std::string& kind = t.rows.front().back();
  if (kind == "filter") ps.kind = SeriesKind::Filter;
  else if (kind == "smoother") ps.kind = SeriesKind::Smoother;
  else throw InvalidInput(path.string() + ": kind must be 'filter' or 'smoother', got '" + kind + "'");
  ps.states.resize(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    auto& st = ps.states[r];
    st.mean.resize(l);
    st.cov.resize(l, l);
    const auto& row = t.rows[r];
    const std::string ctx = path.string() + " row " + std::to_string(r + 1);
    for (int i = 0; i < l; ++i) st.mean(i) = parse_double(row[1 + static_cast<std::size_t>(i)], ctx);
    std::size_t cc = 1 + static_cast<std::size_t>(l);
    for (int a = 0; a < l; ++a)
      for (int b = a; b < l; ++b, ++cc) st.cov(a, b) = st.cov(b, a) = parse_double(row[cc], ctx);
  }
  return ps;
}

void write_sample_csv(const std::filesystem::path& path, const TimeGrid& grid,
                      const Matrix& sample) {
  std::string s = "t";
  for (Eigen::Index i = 0; i < sample.cols(); ++i) s += ",yhat_" + std::to_string(i);
  s += '\n';
  for (Eigen::Index j = 0; j < sample.rows(); ++j) {
    s += format_double(grid.time(j));
    for (Eigen::Index i = 0; i < sample.cols(); ++i) s += ',' + format_double(sample(j, i));
    s += '\n';
  }
  write_file(path, s);
}

Matrix read_sample_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const int l = t.header.empty() || t.header[0] != "t" ? 0 : count_prefixed(t.header, "yhat_", 1);
  if (l < 1 || t.header.size() != 1 + static_cast<std::size_t>(l))
    schema_error(path, t, "t,yhat_0..yhat_{l-1}");
  Matrix m(static_cast<Eigen::Index>(t.rows.size()), l);
  for (int i = 0; i < l; ++i) {
    const auto c = column(t, 1 + static_cast<std::size_t>(i), path);
    for (std::size_t r = 0; r < c.size(); ++r) m(static_cast<Eigen::Index>(r), i) = c[r];
  }
  return m;
}

void write_curve_csv(const std::filesystem::path& path, const std::string& x_name,
                     const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidInput("curve columns differ in length");
  std::string s = x_name + ",value\n";
  for (std::size_t i = 0; i < x.size(); ++i) s += format_double(x[i]) + ',' + format_double(y[i]) + '\n';
  write_file(path, s);
}

}  // namespace cgns::io
