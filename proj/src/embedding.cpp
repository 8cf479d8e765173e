#include "trajsim/embedding.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "trajsim/errors.hpp"
#include "trajsim/timing.hpp"
#include "trajsim/worker_team.hpp"

namespace trajsim {

namespace {

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

// Splits text into lines, dropping '\r' and a trailing empty line.
std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = end + 1;
  }
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

double parse_at(std::string_view field, std::size_t line) {
  try {
    return parse_double(field);
  } catch (const ParseError& e) {
    throw ParseError(e.what(), line);
  }
}

void append_row(std::string& out, const double* values, std::size_t n) {
  for (std::size_t c = 0; c < n; ++c) {
    if (c) out += ',';
    out += format_double(values[c]);
  }
  out += '\n';
}

}  // namespace

void FfnWeights::validate() const {
  if (d == 0 || L == 0) throw ValidationError("ffn weights need d >= 1 and L >= 1");
  if (w1.size() != 2 * L * d || b1.size() != d || w2.size() != d * d || b2.size() != d) {
    throw ValidationError("ffn weight shapes inconsistent with d and L");
  }
  for (const auto* m : {&w1, &b1, &w2, &b2}) {
    for (double v : *m) {
      if (!std::isfinite(v)) throw ValidationError("ffn weights contain a non-finite entry");
    }
  }
}

FfnWeights FfnWeights::zeros(std::size_t d, std::size_t L) {
  FfnWeights w;
  w.d = d;
  w.L = L;
  w.w1.assign(2 * L * d, 0.0);
  w.b1.assign(d, 0.0);
  w.w2.assign(d * d, 0.0);
  w.b2.assign(d, 0.0);
  return w;
}

FfnWeights FfnWeights::random(std::size_t d, std::size_t L, std::uint64_t seed) {
  FfnWeights w = zeros(d, L);
  std::mt19937_64 rng(seed);
  auto fill = [&](std::vector<double>& m, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (double& v : m) v = u(rng);
  };
  fill(w.w1, 2 * L);
  fill(w.b1, 2 * L);
  fill(w.w2, d);
  fill(w.b2, d);
  return w;
}

std::vector<double> flatten_input(const Trajectory& t, std::size_t L) {
  std::vector<double> x(2 * L, 0.0);
  if (t.empty()) return x;
  for (std::size_t k = 0; k < L; ++k) {
    const Point& p = t[std::min(k, t.size() - 1)];
    x[2 * k] = p.x;
    x[2 * k + 1] = p.y;
  }
  return x;
}

Embedding ffn_encode(const Trajectory& t, const FfnWeights& w) {
  if (t.empty()) throw ValidationError("cannot encode an empty trajectory");
  const std::size_t d = w.d;
  const std::vector<double> x = flatten_input(t, w.L);

  std::vector<double> h(w.b1);
  for (std::size_t r = 0; r < x.size(); ++r) {
    const double xr = x[r];
    const double* row = w.w1.data() + r * d;
    for (std::size_t c = 0; c < d; ++c) h[c] += xr * row[c];
  }
  for (double& v : h) v = v > 0.0 ? v : 0.0;

  Embedding e{t.id(), w.b2};
  for (std::size_t r = 0; r < d; ++r) {
    const double hr = h[r];
    const double* row = w.w2.data() + r * d;
    for (std::size_t c = 0; c < d; ++c) e.vec[c] += hr * row[c];
  }
  return e;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("embedding dimension mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::fabs(a[k] - b[k]);
  return s;
}

double l2_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("embedding dimension mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return std::sqrt(s);
}

double similarity(const Embedding& h, const Embedding& h2) { return 1.0 - l1_distance(h.vec, h2.vec); }

void EmbeddingStore::add(Embedding e) {
  if (e.vec.size() != d_) {
    throw ValidationError("embedding '" + e.id + "' has dimension " + std::to_string(e.vec.size()) +
                          ", store expects " + std::to_string(d_));
  }
  for (double v : e.vec) {
    if (!std::isfinite(v)) throw ValidationError("embedding '" + e.id + "' has a non-finite component");
  }
  if (!index_.emplace(e.id, entries_.size()).second) throw ValidationError("duplicate embedding id '" + e.id + "'");
  entries_.push_back(std::move(e));
}

const Embedding* EmbeddingStore::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

EmbeddingStore encode_dataset(const Dataset& ds, const FfnWeights& w, std::size_t workers, double* emb_seconds) {
  w.validate();
  Stopwatch sw;
  std::vector<Embedding> out(ds.size());
  WorkerTeam team(std::max<std::size_t>(1, std::min(workers, ds.size())));
  std::atomic<std::size_t> next{0};
  team.run([&](std::size_t) {
    for (std::size_t i = next.fetch_add(1); i < ds.size(); i = next.fetch_add(1)) out[i] = ffn_encode(ds[i], w);
  });
  EmbeddingStore store(w.d);
  for (auto& e : out) store.add(std::move(e));
  if (emb_seconds) *emb_seconds = sw.seconds();
  return store;
}

std::string format_store(const EmbeddingStore& s) {
  std::string out = "id";
  for (std::size_t k = 1; k <= s.dim(); ++k) out += ",v" + std::to_string(k);
  out += '\n';
  for (const auto& e : s.entries()) {
    out += e.id;
    out += ',';
    append_row(out, e.vec.data(), e.vec.size());
  }
  return out;
}

EmbeddingStore parse_store(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw ParseError("embedding file has no header", 1);
  const auto header = split_fields(lines[0], ',');
  if (header.empty() || header[0] != "id") throw ParseError("embedding header must start with 'id'", 1);
  const std::size_t d = header.size() - 1;
  EmbeddingStore store(d);
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const auto f = split_fields(lines[ln], ',');
    if (f.size() != d + 1) {
      throw ValidationError("line " + std::to_string(ln + 1) + ": expected " + std::to_string(d) + " values, got " +
                            std::to_string(f.size() - 1));
    }
    Embedding e{std::string(f[0]), std::vector<double>(d)};
    for (std::size_t k = 0; k < d; ++k) e.vec[k] = parse_at(f[k + 1], ln + 1);
    store.add(std::move(e));
  }
  return store;
}

void save_store(const EmbeddingStore& s, const std::string& path) { write_file(path, format_store(s)); }
EmbeddingStore load_store(const std::string& path) { return parse_store(read_file(path)); }

std::string format_weights(const FfnWeights& w) {
  w.validate();
  std::string out;
  auto block = [&](const char* name, const std::vector<double>& m, std::size_t rows, std::size_t cols) {
    out += std::string(name) + " " + std::to_string(rows) + " " + std::to_string(cols) + "\n";
    for (std::size_t r = 0; r < rows; ++r) append_row(out, m.data() + r * cols, cols);
  };
  block("W1", w.w1, 2 * w.L, w.d);
  block("b1", w.b1, 1, w.d);
  block("W2", w.w2, w.d, w.d);
  block("b2", w.b2, 1, w.d);
  return out;
}

FfnWeights parse_weights(std::string_view text) {
  const auto lines = lines_of(text);
  std::size_t ln = 0;
  auto block = [&](std::string_view name, std::size_t& rows, std::size_t& cols) {
    if (ln >= lines.size()) throw ParseError("missing block " + std::string(name), ln + 1);
    std::istringstream hs{std::string(lines[ln])};
    std::string tag;
    if (!(hs >> tag >> rows >> cols) || tag != name) {
      throw ParseError("expected header '" + std::string(name) + " <rows> <cols>'", ln + 1);
    }
    ++ln;
    std::vector<double> m;
    m.reserve(rows * cols);
    for (std::size_t r = 0; r < rows; ++r, ++ln) {
      if (ln >= lines.size()) throw ParseError("block " + std::string(name) + " truncated", ln + 1);
      const auto f = split_fields(lines[ln], ',');
      if (f.size() != cols) throw ParseError("expected " + std::to_string(cols) + " values", ln + 1);
      for (auto v : f) m.push_back(parse_at(v, ln + 1));
    }
    return m;
  };
  FfnWeights w;
  std::size_t r = 0, c = 0;
  w.w1 = block("W1", r, c);
  if (r % 2 != 0) throw ParseError("W1 must have 2L rows", 1);
  w.L = r / 2;
  w.d = c;
  w.b1 = block("b1", r, c);
  w.w2 = block("W2", r, c);
  w.b2 = block("b2", r, c);
  w.validate();
  return w;
}

void save_weights(const FfnWeights& w, const std::string& path) { write_file(path, format_weights(w)); }
FfnWeights load_weights(const std::string& path) { return parse_weights(read_file(path)); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

}  // namespace trajsim
