#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "uflow/bench.hpp"

namespace uflow::bench {

namespace {

constexpr double kZ95 = 1.96;

TTest from_statistic(double t, double df) {
  TTest r;
  r.t = t;
  r.df = df;
  if (std::isnan(t)) return r;
  if (std::isinf(t)) {
    r.p_two_sided = 0.0;
    r.p_less = t < 0 ? 0.0 : 1.0;
    r.p_greater = t > 0 ? 0.0 : 1.0;
    return r;
  }
  const boost::math::students_t dist(df);
  r.p_less = boost::math::cdf(dist, t);
  r.p_greater = boost::math::cdf(boost::math::complement(dist, t));
  r.p_two_sided = std::min(1.0, 2.0 * std::min(r.p_less, r.p_greater));
  return r;
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance_of(std::span<const double> v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

// t for a mean difference over its standard error; 0/0 reads as no difference.
double ratio(double diff, double se) {
  if (se > 0.0) return diff / se;
  if (diff == 0.0) return 0.0;
  return diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

}  // namespace

Summary summarize(std::span<const double> values) {
  Summary s;
  s.n = static_cast<int>(values.size());
  if (s.n == 0) return s;
  s.mean = mean_of(values);
  if (s.n >= 2) {
    s.sd = std::sqrt(variance_of(values, s.mean));
    s.ci_half = kZ95 * s.sd / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

TTest paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("paired t-test: samples differ in size");
  if (a.size() < 2) throw Error("paired t-test: needs at least two pairs");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double m = mean_of(d);
  const double n = static_cast<double>(d.size());
  return from_statistic(ratio(m, std::sqrt(variance_of(d, m) / n)), n - 1.0);
}

TTest welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw Error("welch t-test: each sample needs two values");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = mean_of(a), mb = mean_of(b);
  const double va = variance_of(a, ma) / na;
  const double vb = variance_of(b, mb) / nb;
  const double se2 = va + vb;
  const double df = se2 > 0.0 ? se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0)) : na + nb - 2.0;
  return from_statistic(ratio(ma - mb, std::sqrt(se2)), df);
}

}  // namespace uflow::bench
