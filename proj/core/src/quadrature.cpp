#include "zcurve/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace zcurve::quadrature {

namespace {

// Kronrod abscissae (descending, last is the centre) and weights; the
// Gauss 7-point weights belong to the odd-indexed abscissae.
constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment kronrod15(const std::function<double(double)>& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod = fc * wgk[7];
  double gauss = fc * wg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * xgk[j];
    const double pair = f(centre - dx) + f(centre + dx);
    kronrod += wgk[j] * pair;
    if (j % 2 == 1) gauss += wg[j / 2] * pair;
  }
  return Segment{a, b, kronrod * half, std::fabs((kronrod - gauss) * half)};
}

bool within(double error, double value, const Tolerance& tol) {
  return error <= std::max(tol.absolute, tol.relative * std::fabs(value));
}

}  // namespace

Result gauss_kronrod(const std::function<double(double)>& f, double a, double b, Tolerance tol,
                     std::size_t max_intervals) {
  Result out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Segment> heap;
  heap.push(kronrod15(f, a, b));
  out.evaluations = 15;
  double value = heap.top().value;
  double error = heap.top().error;
  out.previous = value;
  while (!within(error, value, tol) && heap.size() < max_intervals) {
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Segment left = kronrod15(f, worst.a, mid);
    const Segment right = kronrod15(f, mid, worst.b);
    out.evaluations += 30;
    out.previous = value;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    if (!std::isfinite(value)) break;
  }
  // Re-sum to shed the drift of the running totals.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.error = error;
  out.converged = std::isfinite(value) && within(error, value, tol);
  return out;
}

namespace {

struct Region {
  std::vector<double> centre;
  std::vector<double> half;
  double value = 0.0;
  double error = 0.0;
  std::size_t split = 0;
  bool operator<(const Region& other) const { return error < other.error; }
};

class GenzMalik {
 public:
  explicit GenzMalik(std::size_t dim) : dim_(dim) {
    const double d = static_cast<double>(dim);
    w1_ = (12824.0 - 9120.0 * d + 400.0 * d * d) / 19683.0;
    w2_ = 980.0 / 6561.0;
    w3_ = (1820.0 - 400.0 * d) / 19683.0;
    w4_ = 200.0 / 19683.0;
    w5_ = 6859.0 / 19683.0 / std::ldexp(1.0, static_cast<int>(dim));
    e1_ = (729.0 - 950.0 * d + 50.0 * d * d) / 729.0;
    e2_ = 245.0 / 486.0;
    e3_ = (265.0 - 100.0 * d) / 1458.0;
    e4_ = 25.0 / 729.0;
  }

  std::size_t points() const { return 1 + 4 * dim_ + 2 * dim_ * (dim_ - 1) + (std::size_t{1} << dim_); }

  void evaluate(const std::function<double(std::span<const double>)>& f, Region& r) const {
    static const double l2 = std::sqrt(9.0 / 70.0);
    static const double l4 = std::sqrt(9.0 / 10.0);
    static const double l5 = std::sqrt(9.0 / 19.0);
    std::vector<double> x = r.centre;
    const double f0 = f(x);
    double sum2 = 0.0;
    double sum3 = 0.0;
    double best = 0.0;
    std::vector<double> diffs(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
      auto at = [&](double offset) {
        x[i] = r.centre[i] + offset * r.half[i];
        const double v = f(x);
        x[i] = r.centre[i];
        return v;
      };
      const double a = at(l2) + at(-l2);
      const double b = at(l4) + at(-l4);
      sum2 += a;
      sum3 += b;
      diffs[i] = std::fabs(a - 2.0 * f0 - (b - 2.0 * f0) / 7.0);
      best = std::max(best, diffs[i]);
    }
    // Split along the largest fourth difference; near-ties go to the
    // widest side.
    r.split = 0;
    double widest = -1.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      if (diffs[i] >= best * (1.0 - 1e-10) && r.half[i] > widest) {
        widest = r.half[i];
        r.split = i;
      }
    }
    double sum4 = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = i + 1; j < dim_; ++j) {
        for (double si : {1.0, -1.0}) {
          for (double sj : {1.0, -1.0}) {
            x[i] = r.centre[i] + si * l4 * r.half[i];
            x[j] = r.centre[j] + sj * l4 * r.half[j];
            sum4 += f(x);
          }
        }
        x[i] = r.centre[i];
        x[j] = r.centre[j];
      }
    }
    double sum5 = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << dim_); ++mask) {
      for (std::size_t i = 0; i < dim_; ++i) {
        x[i] = r.centre[i] + ((mask >> i) & 1U ? l5 : -l5) * r.half[i];
      }
      sum5 += f(x);
    }
    double volume = 1.0;
    for (double h : r.half) volume *= 2.0 * h;
    const double seven = volume * (w1_ * f0 + w2_ * sum2 + w3_ * sum3 + w4_ * sum4 + w5_ * sum5);
    const double five = volume * (e1_ * f0 + e2_ * sum2 + e3_ * sum3 + e4_ * sum4);
    r.value = seven;
    r.error = std::fabs(seven - five);
  }

 private:
  std::size_t dim_;
  double w1_, w2_, w3_, w4_, w5_, e1_, e2_, e3_, e4_;
};

}  // namespace

Result genz_malik(const std::function<double(std::span<const double>)>& f, std::span<const double> lower,
                  std::span<const double> upper, Tolerance tol, std::size_t max_evaluations) {
  const std::size_t dim = lower.size();
  Result out;
  if (dim < 2) {
    // The rule needs two dimensions; integrate 1-d problems with Kronrod.
    if (dim == 1) {
      std::vector<double> x(1);
      return gauss_kronrod(
          [&](double t) {
            x[0] = t;
            return f(x);
          },
          lower[0], upper[0], tol, max_evaluations / 30 + 1);
    }
    std::vector<double> none;
    out.value = f(none);
    out.converged = true;
    out.evaluations = 1;
    return out;
  }
  const GenzMalik rule(dim);
  Region root;
  root.centre.resize(dim);
  root.half.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    root.centre[i] = 0.5 * (lower[i] + upper[i]);
    root.half[i] = 0.5 * (upper[i] - lower[i]);
  }
  rule.evaluate(f, root);
  out.evaluations = rule.points();
  double value = root.value;
  double error = root.error;
  out.previous = value;
  std::priority_queue<Region> heap;
  heap.push(std::move(root));
  while (!within(error, value, tol) && out.evaluations + 2 * rule.points() <= max_evaluations) {
    Region worst = heap.top();
    heap.pop();
    Region left = worst;
    Region right = worst;
    const std::size_t s = worst.split;
    left.half[s] = right.half[s] = 0.5 * worst.half[s];
    left.centre[s] = worst.centre[s] - left.half[s];
    right.centre[s] = worst.centre[s] + right.half[s];
    rule.evaluate(f, left);
    rule.evaluate(f, right);
    out.evaluations += 2 * rule.points();
    out.previous = value;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(std::move(left));
    heap.push(std::move(right));
    if (!std::isfinite(value)) break;
  }
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.error = error;
  out.converged = std::isfinite(value) && within(error, value, tol);
  return out;
}

}  // namespace zcurve::quadrature
