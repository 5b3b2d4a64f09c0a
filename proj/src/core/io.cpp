#include "core/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace becmirror {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  return f;
}

}  // namespace

void write_wigner_csv(const WignerGrid& g, const std::string& path) {
  std::ofstream f = open_out(path);
  f << "x,p,w\n";
  for (int i = 0; i < g.spec.n_x; ++i)
    for (int j = 0; j < g.spec.n_p; ++j)
      f << format_double(g.spec.x(i)) << ',' << format_double(g.spec.p(j))
        << ',' << format_double(g.at(i, j)) << '\n';
  if (!f) throw IoError("write failed for '" + path + "'");
}

WignerGrid read_wigner_csv(const std::string& path) {
  std::ifstream f = open_in(path);
  std::string line;
  if (!std::getline(f, line) || line != "x,p,w")
    throw IoError("'" + path + "': expected header 'x,p,w'");
  std::vector<double> xs, ps, ws;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    double x, p, w;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &p, &w) != 3)
      throw IoError("'" + path + "': malformed row '" + line + "'");
    xs.push_back(x);
    ps.push_back(p);
    ws.push_back(w);
  }
  if (ws.size() < 4) throw IoError("'" + path + "': too few rows");

  size_t n_p = 1;
  while (n_p < ps.size() && xs[n_p] == xs[0]) ++n_p;
  if (ws.size() % n_p != 0)
    throw IoError("'" + path + "': rows do not form a rectangular grid");
  const size_t n_x = ws.size() / n_p;

  WignerGrid g;
  g.spec.n_x = (int)n_x;
  g.spec.n_p = (int)n_p;
  g.spec.x_min = xs.front();
  g.spec.x_max = xs.back();
  g.spec.p_min = ps.front();
  g.spec.p_max = ps[n_p - 1];
  g.spec.validate();
  g.w = std::move(ws);
  return g;
}

void write_wigner_json(const WignerGrid& g, const std::string& path) {
  std::ofstream f = open_out(path);
  f << "{\"x_min\":" << format_double(g.spec.x_min)
    << ",\"x_max\":" << format_double(g.spec.x_max) << ",\"n_x\":" << g.spec.n_x
    << ",\"p_min\":" << format_double(g.spec.p_min)
    << ",\"p_max\":" << format_double(g.spec.p_max) << ",\"n_p\":" << g.spec.n_p
    << ",\"values\":[";
  for (size_t k = 0; k < g.w.size(); ++k) {
    if (k) f << ',';
    f << format_double(g.w[k]);
  }
  f << "]}\n";
  if (!f) throw IoError("write failed for '" + path + "'");
}

WignerGrid read_wigner_json(const std::string& path) {
  std::ifstream f = open_in(path);
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  WignerGrid g;
  auto grab = [&](const char* key) {
    const std::string needle = std::string("\"") + key + "\":";
    const size_t pos = text.find(needle);
    if (pos == std::string::npos)
      throw IoError("'" + path + "': missing key " + key);
    return std::strtod(text.c_str() + pos + needle.size(), nullptr);
  };
  g.spec.x_min = grab("x_min");
  g.spec.x_max = grab("x_max");
  g.spec.n_x = (int)grab("n_x");
  g.spec.p_min = grab("p_min");
  g.spec.p_max = grab("p_max");
  g.spec.n_p = (int)grab("n_p");
  g.spec.validate();
  const size_t open = text.find('[');
  const size_t close = text.rfind(']');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw IoError("'" + path + "': missing values array");
  g.w.reserve((size_t)g.spec.n_x * g.spec.n_p);
  const char* cur = text.c_str() + open + 1;
  const char* end = text.c_str() + close;
  while (cur < end) {
    char* next = nullptr;
    const double v = std::strtod(cur, &next);
    if (next == cur) break;
    g.w.push_back(v);
    cur = next;
    while (cur < end && (*cur == ',' || *cur == ' ' || *cur == '\n')) ++cur;
  }
  if (g.w.size() != (size_t)g.spec.n_x * g.spec.n_p)
    throw IoError("'" + path + "': value count does not match grid size");
  return g;
}

namespace {

double symmetric_peak(const WignerGrid& g) {
  double peak = 0.0;
  for (double v : g.w) peak = std::max(peak, std::abs(v));
  return peak > 0.0 ? peak : 1.0;
}

}  // namespace

void write_wigner_pgm(const WignerGrid& g, const std::string& path) {
  std::ofstream f = open_out(path);
  const double peak = symmetric_peak(g);
  f << "P5\n" << g.spec.n_x << ' ' << g.spec.n_p << "\n255\n";
  for (int j = g.spec.n_p - 1; j >= 0; --j)
    for (int i = 0; i < g.spec.n_x; ++i) {
      const double t = g.at(i, j) / peak;  // [-1, 1]
      const int byte = (int)std::lround(127.5 + 127.5 * t);
      f.put((char)std::clamp(byte, 0, 255));
    }
  if (!f) throw IoError("write failed for '" + path + "'");
}

void write_wigner_ppm(const WignerGrid& g, const std::string& path) {
  std::ofstream f = open_out(path);
  const double peak = symmetric_peak(g);
  f << "P6\n" << g.spec.n_x << ' ' << g.spec.n_p << "\n255\n";
  for (int j = g.spec.n_p - 1; j >= 0; --j)
    for (int i = 0; i < g.spec.n_x; ++i) {
      const double t = std::clamp(g.at(i, j) / peak, -1.0, 1.0);
      int r = 255, gb = 255, b = 255;
      if (t >= 0.0) {
        gb = b = (int)std::lround(255.0 * (1.0 - t));
      } else {
        r = gb = (int)std::lround(255.0 * (1.0 + t));
      }
      f.put((char)r).put((char)gb).put((char)b);
    }
  if (!f) throw IoError("write failed for '" + path + "'");
}

void write_ensemble_csv(const SdeEnsemble& e, const std::string& path) {
  std::ofstream f = open_out(path);
  f << "t,mean_x2,mean_p2,mean_xm,mean_pm,"
       "cov_x2x2,cov_x2p2,cov_x2xm,cov_x2pm,cov_p2p2,cov_p2xm,cov_p2pm,"
       "cov_xmxm,cov_xmpm,cov_pmpm\n";
  for (size_t s = 0; s < e.times.size(); ++s) {
    f << format_double(e.times[s]);
    for (int i = 0; i < 4; ++i) f << ',' << format_double(e.mean[s](i));
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) f << ',' << format_double(e.cov[s](i, j));
    f << '\n';
  }
  if (!f) throw IoError("write failed for '" + path + "'");
}

void write_timeseries_csv(const TimeSeries& ts, const std::string& path) {
  std::ofstream f = open_out(path);
  f << "t,re_a,im_a,x_2,p_2,x_m,p_m\n";
  for (size_t s = 0; s < ts.t.size(); ++s) {
    f << format_double(ts.t[s]);
    for (int i = 0; i < 6; ++i) f << ',' << format_double(ts.y[s](i));
    f << '\n';
  }
  if (!f) throw IoError("write failed for '" + path + "'");
}

}  // namespace becmirror
