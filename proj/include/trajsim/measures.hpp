#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trajsim/exact_sum.hpp"
#include "trajsim/trajectory.hpp"

namespace trajsim {

enum class MeasureKind { kSpd, kCdds, kSar, kDtw, kFrechet, kLcss, kEdr, kErp, kStedr, kHausdorff, kOwd };

/// How a measure matches points: one pass, a DP score matrix, or all point pairs.
enum class MeasureClass { kLinearScan, kDynamicProgramming, kEnumeration };

struct MeasureParams {
  std::optional<double> eps_spatial;   // LCSS, EDR, STEDR, CDDS
  std::optional<double> eps_temporal;  // STEDR
  std::optional<Point> gap_point;      // ERP
  std::optional<std::size_t> sax_word_length;       // SAR
  std::optional<std::size_t> sax_alphabet;          // SAR, in [2, 20]
  std::optional<std::size_t> sax_symbol_threshold;  // SAR
};

struct MeasureSpec {
  MeasureKind kind = MeasureKind::kDtw;
  MeasureParams params;

  /// Spec with the conventional defaults filled in for whatever `kind` needs:
  /// eps 1.0, eps_t 60 s, gap point (0,0), SAX word 8 / alphabet 4 / threshold 0.
  static MeasureSpec with_defaults(MeasureKind kind);
};

std::string_view measure_name(MeasureKind kind);
/// Case-insensitive; accepts "frechet" and "frechet_discrete". Throws ParameterError.
MeasureKind parse_measure(std::string_view name);
MeasureClass measure_class(MeasureKind kind);
/// True for CDDS, SAR and LCSS.
bool larger_is_more_similar(MeasureKind kind);
/// True for CDDS, SAR and STEDR.
bool requires_timestamps(MeasureKind kind);
/// LCSS, EDR and STEDR return counts.
bool integer_valued(MeasureKind kind);

/// Checks that exactly the parameters `spec.kind` needs are present and in range.
void validate_params(const MeasureSpec& spec);
/// validate_params plus the trajectory preconditions of the measure.
void validate_inputs(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b);

// Linear scan.
double spd(const Trajectory& a, const Trajectory& b);
double cdds(const Trajectory& a, const Trajectory& b, double eps);
double sar(const Trajectory& a, const Trajectory& b, const MeasureParams& params);

// Dynamic programming.
double dtw(const Trajectory& a, const Trajectory& b);
double frechet_discrete(const Trajectory& a, const Trajectory& b);
double erp(const Trajectory& a, const Trajectory& b, const Point& gap);
long edr(const Trajectory& a, const Trajectory& b, double eps);
long lcss(const Trajectory& a, const Trajectory& b, double eps);
long stedr(const Trajectory& a, const Trajectory& b, double eps, double eps_t);

// Enumeration.
double hausdorff(const Trajectory& a, const Trajectory& b);
double owd(const Trajectory& a, const Trajectory& b);

/// Dispatches on spec.kind after validate_inputs.
double evaluate(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b);

namespace detail {
/// evaluate() for inputs that already passed validate_inputs.
double evaluate_unchecked(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b);
}  // namespace detail

/// Full (|a|+1) x (|b|+1) DP table, for inspection and debugging.
struct ScoreMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

/// Throws ParameterError for non-DP measures.
ScoreMatrix dp_score_matrix(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b);

// Building blocks of the linear-scan measures, shared with the parallel engine.

/// Index pairs (i, j) produced by the timestamp merge used by CDDS.
struct TimePairing {
  std::vector<std::size_t> a;
  std::vector<std::size_t> b;
  std::size_t size() const { return a.size(); }
};
constexpr double kTimeAlignTolerance = 1e-6;
TimePairing pair_by_time(const Trajectory& a, const Trajectory& b);
/// Contribution of the interval between paired samples k and k+1.
double cdds_segment(const Trajectory& a, const Trajectory& b, const TimePairing& pairs, std::size_t k, double eps);

namespace sax {

/// Standard-normal breakpoints splitting the line into `alphabet` equiprobable bins.
const std::vector<double>& breakpoints(std::size_t alphabet);
/// Bin index of `value`: number of breakpoints <= value.
int symbol(double value, std::size_t alphabet);

struct Word {
  double t_begin = 0.0;
  double t_end = 0.0;
  std::vector<int> x;  // one symbol per segment
  std::vector<int> y;

  std::size_t length() const { return x.size(); }
  double segment_begin(std::size_t s) const;
  double segment_end(std::size_t s) const;
};

// Encoding runs in three passes over the points, each of which can be split
// across workers and merged exactly: coordinate sums, squared deviations,
// per-segment sums of the z-normalized values.
struct CoordSums {
  ExactSum x;
  ExactSum y;
  void merge(const CoordSums& o) {
    x.merge(o.x);
    y.merge(o.y);
  }
};

struct Normalizer {
  double mean_x = 0.0, mean_y = 0.0;
  double std_x = 1.0, std_y = 1.0;
  // A (near-)constant dimension is symbolized from its raw values.
  bool scale_x = false, scale_y = false;

  double x(double v) const { return scale_x ? (v - mean_x) / std_x : v; }
  double y(double v) const { return scale_y ? (v - mean_y) / std_y : v; }
};

struct SegmentSums {
  std::vector<ExactSum> x;
  std::vector<ExactSum> y;
  std::vector<std::size_t> count;

  explicit SegmentSums(std::size_t word_length) : x(word_length), y(word_length), count(word_length, 0) {}
  void merge(const SegmentSums& o);
};

void add_coords(const Trajectory& t, std::size_t i, CoordSums& sums);
void add_deviation(const Trajectory& t, std::size_t i, double mean_x, double mean_y, CoordSums& dev);
Normalizer make_normalizer(const CoordSums& sums, const CoordSums& dev, std::size_t n);
std::size_t segment_of(const Trajectory& t, std::size_t i, std::size_t word_length);
void add_to_segment(const Trajectory& t, std::size_t i, const Normalizer& norm, SegmentSums& seg);
/// Segment means to symbols; an empty segment repeats the previous segment's mean.
Word finish(const Trajectory& t, const SegmentSums& seg, std::size_t alphabet);

Word encode(const Trajectory& t, std::size_t word_length, std::size_t alphabet);

/// Overlapping segment pairs (sa, sb) of two words in time order.
std::vector<std::pair<std::size_t, std::size_t>> aligned_segments(const Word& a, const Word& b);
/// Overlapped duration if the pair's symbol distance is within the threshold, else 0.
double segment_contribution(const Word& a, const Word& b, std::size_t sa, std::size_t sb, std::size_t threshold);

}  // namespace sax

}  // namespace trajsim
