#include "trajsim/measures.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>

#include "trajsim/detail/dp_kernels.hpp"
#include "trajsim/detail/harvest.hpp"
#include "trajsim/errors.hpp"

namespace trajsim {

namespace {

struct NameEntry {
  MeasureKind kind;
  std::string_view name;
};

constexpr std::array<NameEntry, 11> kNames{{
    {MeasureKind::kSpd, "spd"},
    {MeasureKind::kCdds, "cdds"},
    {MeasureKind::kSar, "sar"},
    {MeasureKind::kDtw, "dtw"},
    {MeasureKind::kFrechet, "frechet"},
    {MeasureKind::kLcss, "lcss"},
    {MeasureKind::kEdr, "edr"},
    {MeasureKind::kErp, "erp"},
    {MeasureKind::kStedr, "stedr"},
    {MeasureKind::kHausdorff, "hausdorff"},
    {MeasureKind::kOwd, "owd"},
}};

void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError(what);
}

void require_absent(bool present, MeasureKind kind, std::string_view param) {
  if (present) {
    throw ParameterError(std::string(measure_name(kind)) + " does not take parameter " + std::string(param));
  }
}

void require_eps(const std::optional<double>& v, MeasureKind kind, std::string_view param) {
  require(v.has_value(), std::string(measure_name(kind)) + " requires " + std::string(param));
  require(std::isfinite(*v) && *v >= 0.0, std::string(param) + " must be finite and >= 0");
}

void min_distances(const Trajectory& a, const Trajectory& b, std::vector<double>& row_min,
                   std::vector<double>& col_min) {
  row_min.assign(a.size(), detail::kInf);
  col_min.assign(b.size(), detail::kInf);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = distance(a[i], b[j]);
      row_min[i] = std::min(row_min[i], d);
      col_min[j] = std::min(col_min[j], d);
    }
  }
}

double spd_unchecked(const Trajectory& a, const Trajectory& b) {
  ExactSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s += distance(a[i], b[i]);
  return s.value();
}

double cdds_unchecked(const Trajectory& a, const Trajectory& b, double eps) {
  const TimePairing pairs = pair_by_time(a, b);
  ExactSum s;
  for (std::size_t k = 0; k + 1 < pairs.size(); ++k) s += cdds_segment(a, b, pairs, k, eps);
  return s.value();
}

double sar_unchecked(const Trajectory& a, const Trajectory& b, const MeasureParams& p) {
  const sax::Word wa = sax::encode(a, *p.sax_word_length, *p.sax_alphabet);
  const sax::Word wb = sax::encode(b, *p.sax_word_length, *p.sax_alphabet);
  ExactSum s;
  for (auto [sa, sb] : sax::aligned_segments(wa, wb)) {
    s += sax::segment_contribution(wa, wb, sa, sb, *p.sax_symbol_threshold);
  }
  return s.value();
}

double hausdorff_unchecked(const Trajectory& a, const Trajectory& b) {
  std::vector<double> row, col;
  min_distances(a, b, row, col);
  return detail::hausdorff_from_mins(row, col);
}

double owd_unchecked(const Trajectory& a, const Trajectory& b) {
  std::vector<double> row, col;
  min_distances(a, b, row, col);
  return detail::owd_from_mins(row, col);
}

double dp_unchecked(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b) {
  return detail::with_dp_kernel(spec, a, b, [&](const auto& k) { return detail::dp_sequential(k, a.size(), b.size()); });
}

MeasureSpec spec_of(MeasureKind kind, MeasureParams params = {}) { return MeasureSpec{kind, std::move(params)}; }

}  // namespace

MeasureSpec MeasureSpec::with_defaults(MeasureKind kind) {
  MeasureSpec s{kind, {}};
  switch (kind) {
    case MeasureKind::kLcss:
    case MeasureKind::kEdr:
    case MeasureKind::kCdds:
      s.params.eps_spatial = 1.0;
      break;
    case MeasureKind::kStedr:
      s.params.eps_spatial = 1.0;
      s.params.eps_temporal = 60.0;
      break;
    case MeasureKind::kErp:
      s.params.gap_point = Point{0.0, 0.0, std::nullopt};
      break;
    case MeasureKind::kSar:
      s.params.sax_word_length = 8;
      s.params.sax_alphabet = 4;
      s.params.sax_symbol_threshold = 0;
      break;
    default:
      break;
  }
  return s;
}

std::string_view measure_name(MeasureKind kind) {
  for (const auto& e : kNames) {
    if (e.kind == kind) return e.name;
  }
  return "unknown";
}

MeasureKind parse_measure(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "frechet_discrete" || lower == "discrete_frechet") return MeasureKind::kFrechet;
  for (const auto& e : kNames) {
    if (e.name == lower) return e.kind;
  }
  throw ParameterError("unknown measure '" + std::string(name) + "'");
}

MeasureClass measure_class(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::kSpd:
    case MeasureKind::kCdds:
    case MeasureKind::kSar:
      return MeasureClass::kLinearScan;
    case MeasureKind::kHausdorff:
    case MeasureKind::kOwd:
      return MeasureClass::kEnumeration;
    default:
      return MeasureClass::kDynamicProgramming;
  }
}

bool larger_is_more_similar(MeasureKind kind) {
  return kind == MeasureKind::kCdds || kind == MeasureKind::kSar || kind == MeasureKind::kLcss;
}

bool requires_timestamps(MeasureKind kind) {
  return kind == MeasureKind::kCdds || kind == MeasureKind::kSar || kind == MeasureKind::kStedr;
}

bool integer_valued(MeasureKind kind) {
  return kind == MeasureKind::kLcss || kind == MeasureKind::kEdr || kind == MeasureKind::kStedr;
}

void validate_params(const MeasureSpec& spec) {
  const MeasureKind k = spec.kind;
  const MeasureParams& p = spec.params;
  const bool wants_eps = k == MeasureKind::kLcss || k == MeasureKind::kEdr || k == MeasureKind::kStedr ||
                         k == MeasureKind::kCdds;
  const bool wants_sax = k == MeasureKind::kSar;

  if (wants_eps) {
    require_eps(p.eps_spatial, k, "eps_spatial");
  } else {
    require_absent(p.eps_spatial.has_value(), k, "eps_spatial");
  }
  if (k == MeasureKind::kStedr) {
    require_eps(p.eps_temporal, k, "eps_temporal");
  } else {
    require_absent(p.eps_temporal.has_value(), k, "eps_temporal");
  }
  if (k == MeasureKind::kErp) {
    require(p.gap_point.has_value(), "erp requires gap_point");
    require(std::isfinite(p.gap_point->x) && std::isfinite(p.gap_point->y), "gap_point must be finite");
    require(!p.gap_point->t.has_value(), "gap_point must not carry a timestamp");
  } else {
    require_absent(p.gap_point.has_value(), k, "gap_point");
  }
  if (wants_sax) {
    require(p.sax_word_length.has_value() && p.sax_alphabet.has_value() && p.sax_symbol_threshold.has_value(),
            "sar requires sax_word_length, sax_alphabet and sax_symbol_threshold");
    require(*p.sax_word_length >= 1, "sax_word_length must be >= 1");
    require(*p.sax_alphabet >= 2 && *p.sax_alphabet <= 20, "sax_alphabet must be in [2, 20]");
  } else {
    require_absent(p.sax_word_length.has_value() || p.sax_alphabet.has_value() || p.sax_symbol_threshold.has_value(),
                   k, "sax_*");
  }
}

void validate_inputs(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b) {
  validate_params(spec);
  const std::string name(measure_name(spec.kind));
  if (requires_timestamps(spec.kind) && (!a.timestamped() || !b.timestamped())) {
    throw ValidationError(name + " requires timestamped trajectories");
  }
  switch (spec.kind) {
    case MeasureKind::kSpd:
      if (a.size() != b.size()) {
        throw ValidationError("spd requires trajectories of equal length (" + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()) + ")");
      }
      break;
    case MeasureKind::kDtw:
    case MeasureKind::kFrechet:
    case MeasureKind::kHausdorff:
    case MeasureKind::kOwd:
      if (a.empty() || b.empty()) throw ValidationError(name + " is undefined for an empty trajectory");
      break;
    default:
      break;
  }
}

double spd(const Trajectory& a, const Trajectory& b) {
  validate_inputs(spec_of(MeasureKind::kSpd), a, b);
  return spd_unchecked(a, b);
}

double cdds(const Trajectory& a, const Trajectory& b, double eps) {
  MeasureParams p;
  p.eps_spatial = eps;
  validate_inputs(spec_of(MeasureKind::kCdds, p), a, b);
  return cdds_unchecked(a, b, eps);
}

double sar(const Trajectory& a, const Trajectory& b, const MeasureParams& params) {
  validate_inputs(spec_of(MeasureKind::kSar, params), a, b);
  return sar_unchecked(a, b, params);
}

double dtw(const Trajectory& a, const Trajectory& b) {
  const MeasureSpec s = spec_of(MeasureKind::kDtw);
  validate_inputs(s, a, b);
  return dp_unchecked(s, a, b);
}

double frechet_discrete(const Trajectory& a, const Trajectory& b) {
  const MeasureSpec s = spec_of(MeasureKind::kFrechet);
  validate_inputs(s, a, b);
  return dp_unchecked(s, a, b);
}

double erp(const Trajectory& a, const Trajectory& b, const Point& gap) {
  MeasureParams p;
  p.gap_point = gap;
  const MeasureSpec s = spec_of(MeasureKind::kErp, p);
  validate_inputs(s, a, b);
  return dp_unchecked(s, a, b);
}

long edr(const Trajectory& a, const Trajectory& b, double eps) {
  MeasureParams p;
  p.eps_spatial = eps;
  const MeasureSpec s = spec_of(MeasureKind::kEdr, p);
  validate_inputs(s, a, b);
  return static_cast<long>(dp_unchecked(s, a, b));
}

long lcss(const Trajectory& a, const Trajectory& b, double eps) {
  MeasureParams p;
  p.eps_spatial = eps;
  const MeasureSpec s = spec_of(MeasureKind::kLcss, p);
  validate_inputs(s, a, b);
  return static_cast<long>(dp_unchecked(s, a, b));
}

long stedr(const Trajectory& a, const Trajectory& b, double eps, double eps_t) {
  MeasureParams p;
  p.eps_spatial = eps;
  p.eps_temporal = eps_t;
  const MeasureSpec s = spec_of(MeasureKind::kStedr, p);
  validate_inputs(s, a, b);
  return static_cast<long>(dp_unchecked(s, a, b));
}

double hausdorff(const Trajectory& a, const Trajectory& b) {
  validate_inputs(spec_of(MeasureKind::kHausdorff), a, b);
  return hausdorff_unchecked(a, b);
}

double owd(const Trajectory& a, const Trajectory& b) {
  validate_inputs(spec_of(MeasureKind::kOwd), a, b);
  return owd_unchecked(a, b);
}

double evaluate(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b) {
  validate_inputs(spec, a, b);
  return detail::evaluate_unchecked(spec, a, b);
}

double detail::evaluate_unchecked(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b) {
  switch (spec.kind) {
    case MeasureKind::kSpd:
      return spd_unchecked(a, b);
    case MeasureKind::kCdds:
      return cdds_unchecked(a, b, *spec.params.eps_spatial);
    case MeasureKind::kSar:
      return sar_unchecked(a, b, spec.params);
    case MeasureKind::kHausdorff:
      return hausdorff_unchecked(a, b);
    case MeasureKind::kOwd:
      return owd_unchecked(a, b);
    default:
      return dp_unchecked(spec, a, b);
  }
}

ScoreMatrix dp_score_matrix(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b) {
  if (measure_class(spec.kind) != MeasureClass::kDynamicProgramming) {
    throw ParameterError(std::string(measure_name(spec.kind)) + " is not a DP measure");
  }
  validate_inputs(spec, a, b);
  return detail::with_dp_kernel(spec, a, b, [&](const auto& k) { return detail::dp_full(k, a.size(), b.size()); });
}

TimePairing pair_by_time(const Trajectory& a, const Trajectory& b) {
  TimePairing out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double ta = *a[i].t;
    const double tb = *b[j].t;
    if (std::fabs(ta - tb) <= kTimeAlignTolerance) {
      out.a.push_back(i++);
      out.b.push_back(j++);
    } else if (ta < tb) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

double cdds_segment(const Trajectory& a, const Trajectory& b, const TimePairing& pairs, std::size_t k, double eps) {
  const Point& a0 = a[pairs.a[k]];
  const Point& b0 = b[pairs.b[k]];
  const Point& a1 = a[pairs.a[k + 1]];
  const Point& b1 = b[pairs.b[k + 1]];
  if (distance(a0, b0) > eps || distance(a1, b1) > eps) return 0.0;
  // Midpoint of the paired timestamps keeps the measure exactly symmetric.
  const double t0 = 0.5 * (*a0.t + *b0.t);
  const double t1 = 0.5 * (*a1.t + *b1.t);
  return t1 - t0;
}

}  // namespace trajsim
