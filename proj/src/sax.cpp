#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

#include <boost/math/distributions/normal.hpp>

#include "trajsim/errors.hpp"
#include "trajsim/measures.hpp"

namespace trajsim::sax {

namespace {

constexpr std::size_t kMaxAlphabet = 20;

std::array<std::vector<double>, kMaxAlphabet + 1> make_tables() {
  std::array<std::vector<double>, kMaxAlphabet + 1> tables;
  const boost::math::normal_distribution<double> standard;
  for (std::size_t a = 2; a <= kMaxAlphabet; ++a) {
    for (std::size_t k = 1; k < a; ++k) {
      tables[a].push_back(boost::math::quantile(standard, static_cast<double>(k) / static_cast<double>(a)));
    }
  }
  return tables;
}

}  // namespace

const std::vector<double>& breakpoints(std::size_t alphabet) {
  static const auto tables = make_tables();
  if (alphabet < 2 || alphabet > kMaxAlphabet) throw ParameterError("sax alphabet must be in [2, 20]");
  return tables[alphabet];
}

int symbol(double value, std::size_t alphabet) {
  const auto& bp = breakpoints(alphabet);
  return static_cast<int>(std::upper_bound(bp.begin(), bp.end(), value) - bp.begin());
}

double Word::segment_begin(std::size_t s) const {
  if (s == 0) return t_begin;
  return t_begin + (t_end - t_begin) * static_cast<double>(s) / static_cast<double>(length());
}

double Word::segment_end(std::size_t s) const {
  if (s + 1 == length()) return t_end;
  return segment_begin(s + 1);
}

void SegmentSums::merge(const SegmentSums& o) {
  for (std::size_t s = 0; s < count.size(); ++s) {
    x[s].merge(o.x[s]);
    y[s].merge(o.y[s]);
    count[s] += o.count[s];
  }
}

void add_coords(const Trajectory& t, std::size_t i, CoordSums& sums) {
  sums.x += t[i].x;
  sums.y += t[i].y;
}

void add_deviation(const Trajectory& t, std::size_t i, double mean_x, double mean_y, CoordSums& dev) {
  const double dx = t[i].x - mean_x;
  const double dy = t[i].y - mean_y;
  dev.x += dx * dx;
  dev.y += dy * dy;
}

Normalizer make_normalizer(const CoordSums& sums, const CoordSums& dev, std::size_t n) {
  Normalizer norm;
  if (n == 0) return norm;
  const double count = static_cast<double>(n);
  norm.mean_x = sums.x.value() / count;
  norm.mean_y = sums.y.value() / count;
  norm.std_x = std::sqrt(dev.x.value() / count);
  norm.std_y = std::sqrt(dev.y.value() / count);
  norm.scale_x = norm.std_x > 1e-9 * std::max(1.0, std::fabs(norm.mean_x));
  norm.scale_y = norm.std_y > 1e-9 * std::max(1.0, std::fabs(norm.mean_y));
  return norm;
}

std::size_t segment_of(const Trajectory& t, std::size_t i, std::size_t word_length) {
  const double begin = *t[0].t;
  const double span = *t[t.size() - 1].t - begin;
  if (span <= 0.0) return 0;
  const auto s = static_cast<std::size_t>((*t[i].t - begin) / span * static_cast<double>(word_length));
  return std::min(s, word_length - 1);
}

void add_to_segment(const Trajectory& t, std::size_t i, const Normalizer& norm, SegmentSums& seg) {
  const std::size_t s = segment_of(t, i, seg.count.size());
  seg.x[s] += norm.x(t[i].x);
  seg.y[s] += norm.y(t[i].y);
  ++seg.count[s];
}

Word finish(const Trajectory& t, const SegmentSums& seg, std::size_t alphabet) {
  Word w;
  w.t_begin = *t[0].t;
  w.t_end = *t[t.size() - 1].t;
  const std::size_t len = seg.count.size();
  w.x.resize(len);
  w.y.resize(len);
  double mx = 0.0, my = 0.0;
  for (std::size_t s = 0; s < len; ++s) {
    if (seg.count[s] > 0) {
      mx = seg.x[s].value() / static_cast<double>(seg.count[s]);
      my = seg.y[s].value() / static_cast<double>(seg.count[s]);
    }
    w.x[s] = symbol(mx, alphabet);
    w.y[s] = symbol(my, alphabet);
  }
  return w;
}

Word encode(const Trajectory& t, std::size_t word_length, std::size_t alphabet) {
  if (!t.timestamped()) throw ValidationError("sax encoding requires a timestamped trajectory");
  if (word_length < 1) throw ParameterError("sax word length must be >= 1");
  CoordSums sums, dev;
  for (std::size_t i = 0; i < t.size(); ++i) add_coords(t, i, sums);
  const double n = static_cast<double>(t.size());
  const double mean_x = sums.x.value() / n;
  const double mean_y = sums.y.value() / n;
  for (std::size_t i = 0; i < t.size(); ++i) add_deviation(t, i, mean_x, mean_y, dev);
  const Normalizer norm = make_normalizer(sums, dev, t.size());
  SegmentSums seg(word_length);
  for (std::size_t i = 0; i < t.size(); ++i) add_to_segment(t, i, norm, seg);
  return finish(t, seg, alphabet);
}

std::vector<std::pair<std::size_t, std::size_t>> aligned_segments(const Word& a, const Word& b) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t sa = 0, sb = 0;
  while (sa < a.length() && sb < b.length()) {
    const double ea = a.segment_end(sa);
    const double eb = b.segment_end(sb);
    const double overlap = std::min(ea, eb) - std::max(a.segment_begin(sa), b.segment_begin(sb));
    if (overlap > 0.0) out.emplace_back(sa, sb);
    if (ea < eb) {
      ++sa;
    } else if (eb < ea) {
      ++sb;
    } else {
      ++sa;
      ++sb;
    }
  }
  return out;
}

double segment_contribution(const Word& a, const Word& b, std::size_t sa, std::size_t sb, std::size_t threshold) {
  const auto dx = static_cast<std::size_t>(std::abs(a.x[sa] - b.x[sb]));
  const auto dy = static_cast<std::size_t>(std::abs(a.y[sa] - b.y[sb]));
  if (std::max(dx, dy) > threshold) return 0.0;
  return std::min(a.segment_end(sa), b.segment_end(sb)) - std::max(a.segment_begin(sa), b.segment_begin(sb));
}

}  // namespace trajsim::sax
