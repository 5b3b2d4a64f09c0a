#include "core/wigner.hpp"

#include <cmath>

#include "core/constants.hpp"
#include "core/errors.hpp"

namespace becmirror {

void GridSpec::validate() const {
  if (n_x < 2 || n_p < 2) throw GridError("grid needs at least 2 points per axis");
  if (!(x_max > x_min) || !(p_max > p_min))
    throw GridError("grid bounds must be strictly increasing");
}

bool GridSpec::operator==(const GridSpec& o) const {
  return x_min == o.x_min && x_max == o.x_max && n_x == o.n_x &&
         p_min == o.p_min && p_max == o.p_max && n_p == o.n_p;
}

bool GridSpec::symmetric_square() const {
  return n_x == n_p && x_min == -x_max && p_min == -p_max && x_min == p_min;
}

double WignerGrid::integral() const {
  double sum = 0.0;
  for (int i = 0; i < spec.n_x; ++i) {
    const double wx = (i == 0 || i == spec.n_x - 1) ? 0.5 : 1.0;
    double row = 0.0;
    for (int j = 0; j < spec.n_p; ++j) {
      const double wp = (j == 0 || j == spec.n_p - 1) ? 0.5 : 1.0;
      row += wp * at(i, j);
    }
    sum += wx * row;
  }
  return sum * spec.dx() * spec.dp();
}

double WignerGrid::min_value() const {
  double m = w.empty() ? 0.0 : w[0];
  for (double v : w) m = std::min(m, v);
  return m;
}

namespace {

WignerGrid evaluate(const GridSpec& g, auto&& f) {
  g.validate();
  WignerGrid out;
  out.spec = g;
  out.w.resize((size_t)g.n_x * g.n_p);
  for (int i = 0; i < g.n_x; ++i) {
    const double x = g.x(i);
    for (int j = 0; j < g.n_p; ++j) out.at(i, j) = f(x, g.p(j));
  }
  return out;
}

}  // namespace

WignerGrid wigner_vacuum(const GridSpec& g) {
  const double c = 1.0 / (2.0 * k_pi);
  return evaluate(g, [&](double x, double p) {
    return c * std::exp(-0.5 * (x * x + p * p));
  });
}

WignerGrid wigner_coherent(double alpha, const GridSpec& g) {
  const double c = 1.0 / (2.0 * k_pi);
  const double x0 = 2.0 * alpha;
  return evaluate(g, [&](double x, double p) {
    return c * std::exp(-0.5 * ((x - x0) * (x - x0) + p * p));
  });
}

WignerGrid wigner_thermal(double nbar, const GridSpec& g) {
  if (nbar < 0.0) throw InvalidArgument("thermal occupation must be >= 0");
  const double var = 1.0 + 2.0 * nbar;
  const double c = 1.0 / (2.0 * k_pi * var);
  return evaluate(g, [&](double x, double p) {
    return c * std::exp(-0.5 * (x * x + p * p) / var);
  });
}

WignerGrid wigner_cat(double alpha, const GridSpec& g) {
  const double norm = 2.0 * (1.0 + std::exp(-2.0 * alpha * alpha));
  const double c = 1.0 / (2.0 * k_pi * norm);
  const double x0 = 2.0 * alpha;
  WignerGrid out = evaluate(g, [&](double x, double p) {
    const double lobes = std::exp(-0.5 * ((x - x0) * (x - x0) + p * p)) +
                         std::exp(-0.5 * ((x + x0) * (x + x0) + p * p));
    const double fringe =
        2.0 * std::exp(-0.5 * (x * x + p * p)) * std::cos(2.0 * alpha * p);
    return c * (lobes + fringe);
  });
  if (alpha > 0.0 &&
      std::max(g.dx(), g.dp()) > k_pi / (4.0 * alpha))
    out.fringe_warning = true;
  return out;
}

OverlapResult overlap_fidelity(const WignerGrid& a, const WignerGrid& b) {
  if (!(a.spec == b.spec))
    throw InvalidArgument("overlap_fidelity: grids differ (no resampling)");
  const GridSpec& g = a.spec;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (int i = 0; i < g.n_x; ++i) {
    const double wx = (i == 0 || i == g.n_x - 1) ? 0.5 : 1.0;
    for (int j = 0; j < g.n_p; ++j) {
      const double wp = (j == 0 || j == g.n_p - 1) ? 0.5 : 1.0;
      const double wgt = wx * wp;
      sab += wgt * a.at(i, j) * b.at(i, j);
      saa += wgt * a.at(i, j) * a.at(i, j);
      sbb += wgt * b.at(i, j) * b.at(i, j);
    }
  }
  const double cell = g.dx() * g.dp();
  OverlapResult r;
  r.trace_overlap = 4.0 * k_pi * sab * cell;
  r.normalized_overlap = sab / std::sqrt(saa * sbb);
  return r;
}

Marginals marginals(const WignerGrid& g) {
  Marginals m;
  m.x.assign(g.spec.n_x, 0.0);
  m.p.assign(g.spec.n_p, 0.0);
  for (int i = 0; i < g.spec.n_x; ++i) {
    const double wx = (i == 0 || i == g.spec.n_x - 1) ? 0.5 : 1.0;
    for (int j = 0; j < g.spec.n_p; ++j) {
      const double wp = (j == 0 || j == g.spec.n_p - 1) ? 0.5 : 1.0;
      m.x[i] += wp * g.at(i, j) * g.spec.dp();
      m.p[j] += wx * g.at(i, j) * g.spec.dx();
    }
  }
  return m;
}

}  // namespace becmirror
