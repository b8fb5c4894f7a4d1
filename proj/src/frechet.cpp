// Direction-based integral Frechet distance.
//
// A polyline's tangent angle is a step function of normalized arc length, so
// the cost |angle_a(s) - angle_b(t)| is constant on every cell of the lattice
// spanned by the two curves' breakpoints. A monotone coupling visits a
// staircase of cells; each a-interval is traversed within the cells of its
// row and each b-interval within the cells of its column, and the traversal
// can be concentrated in any one visited cell. The optimum therefore picks,
// per row and per column, the visited cell that pays for it. The DP below
// tracks for the current cell whether its row and its column are paid.

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "shapemap/geometry.hpp"

namespace shapemap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Distances closer than this are treated as ties.
constexpr double kTieEps = 1e-12;
// Breakpoints closer than this (in normalized arc length) are merged.
constexpr double kMergeEps = 1e-12;

double normalize_angle(double a) {
  // atan2 returns (-pi, pi]; fold pi onto -pi.
  return a >= kPi ? a - 2 * kPi : a;
}

// Piecewise-constant direction function.
struct Lattice {
  std::vector<double> at;   // breakpoints in [0, 1], at.front() = 0, back() = 1
  std::vector<double> ang;  // angle on [at[k], at[k + 1]]
  // Lattice line of the sample boundary k / n, filled when refined.
  std::vector<std::size_t> sample_line;
};

// Breakpoints at every vertex, plus the sample boundaries k / refine when
// refine > 0.
Lattice lattice_of(const Polyline& line, int refine) {
  const std::size_t segs = line.segment_count();
  std::vector<double> cum(segs + 1, 0.0);
  std::vector<double> ang(segs);
  for (std::size_t s = 0; s < segs; ++s) {
    Segment seg = line.segment(s);
    cum[s + 1] = cum[s] + seg.length();
    ang[s] = normalize_angle(angle_of(seg.b - seg.a));
  }
  const double total = cum[segs];
  Lattice out;
  out.at.push_back(0.0);
  int k = 1;
  for (std::size_t s = 0; s < segs; ++s) {
    double end = s + 1 == segs ? 1.0 : cum[s + 1] / total;
    while (refine > 0 && k < refine) {
      double u = static_cast<double>(k) / refine;
      if (u >= end - kMergeEps) break;
      if (u > out.at.back() + kMergeEps) {
        out.at.push_back(u);
        out.ang.push_back(ang[s]);
      }
      ++k;
    }
    out.at.push_back(end);
    out.ang.push_back(ang[s]);
  }
  if (refine > 0) {
    out.sample_line.resize(static_cast<std::size_t>(refine) + 1);
    std::size_t line_idx = 0;
    for (int q = 0; q <= refine; ++q) {
      double u = static_cast<double>(q) / refine;
      while (line_idx + 1 < out.at.size() &&
             std::fabs(out.at[line_idx + 1] - u) < std::fabs(out.at[line_idx] - u)) {
        ++line_idx;
      }
      out.sample_line[static_cast<std::size_t>(q)] = line_idx;
    }
  }
  return out;
}

Lattice lattice_of_angles(const std::vector<double>& angles) {
  Lattice out;
  const auto n = angles.size();
  for (std::size_t k = 0; k <= n; ++k) {
    out.at.push_back(static_cast<double>(k) / static_cast<double>(n));
  }
  out.ang = angles;
  return out;
}

// Cost matrix over cells (row-major, a-intervals x b-intervals).
std::vector<double> cell_costs(const Lattice& a, const Lattice& b) {
  const std::size_t na = a.ang.size(), nb = b.ang.size();
  std::vector<double> c(na * nb);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) c[i * nb + j] = angle_diff(a.ang[i], b.ang[j]);
  }
  return c;
}

// State bits: row of the current cell paid, column paid.
constexpr unsigned char kRowPaid = 1;
constexpr unsigned char kColPaid = 2;
constexpr unsigned char kBoth = 3;

// Arrival record per (cell, state): how the state was reached.
enum Move : unsigned char { kStart, kPay, kRight, kUp, kDiag };
struct Arrival {
  unsigned char move = kStart;
  unsigned char from_state = 0;
};

struct Solver {
  const Lattice& a;
  const Lattice& b;
  const std::vector<double>& cost;  // cells of a x b
  std::vector<double> prev, cur;    // per column, 4 states each

  // Exact optimum for curve a against the part of b between lattice lines j0
  // and j1. Returns +inf once every partial coupling exceeds `bound`. Fills
  // `arrivals` (cell-major, 4 states per cell) when given.
  double solve(std::size_t j0, std::size_t j1, double bound,
               std::vector<Arrival>* arrivals) {
    const std::size_t rows = a.ang.size();
    const std::size_t cols = j1 - j0;
    const std::size_t stride = b.ang.size();
    const double tlen = b.at[j1] - b.at[j0];
    if (arrivals) arrivals->assign(rows * cols * 4, Arrival{});
    prev.assign(cols * 4, kInf);
    cur.assign(cols * 4, kInf);
    for (std::size_t i = 0; i < rows; ++i) {
      const double ds = a.at[i + 1] - a.at[i];
      double row_min = kInf;
      for (std::size_t j = 0; j < cols; ++j) {
        const double c = cost[i * stride + j0 + j];
        const double dt = (b.at[j0 + j + 1] - b.at[j0 + j]) / tlen;
        double* v = &cur[j * 4];
        Arrival* arr = arrivals ? &(*arrivals)[(i * cols + j) * 4] : nullptr;
        auto offer = [&](unsigned char st, double val, unsigned char move,
                         unsigned char from) {
          if (val < v[st]) {
            v[st] = val;
            if (arr) arr[st] = {move, from};
          }
        };
        std::fill(v, v + 4, kInf);
        if (i == 0 && j == 0) offer(0, 0.0, kStart, 0);
        if (i > 0 && j > 0) offer(0, prev[(j - 1) * 4 + kBoth], kDiag, kBoth);
        if (i > 0) {
          // Leaving a row requires it paid; the column flag carries over.
          offer(0, prev[j * 4 + kRowPaid], kUp, kRowPaid);
          offer(kColPaid, prev[j * 4 + kBoth], kUp, kBoth);
        }
        if (j > 0) {
          offer(0, cur[(j - 1) * 4 + kColPaid], kRight, kColPaid);
          offer(kRowPaid, cur[(j - 1) * 4 + kBoth], kRight, kBoth);
        }
        offer(kRowPaid, v[0] + c * ds, kPay, 0);
        offer(kColPaid, v[0] + c * dt, kPay, 0);
        offer(kBoth, v[kRowPaid] + c * dt, kPay, kRowPaid);
        offer(kBoth, v[kColPaid] + c * ds, kPay, kColPaid);
        row_min = std::min({row_min, v[0], v[1], v[2], v[3]});
      }
      if (row_min > bound) return kInf;
      std::swap(prev, cur);
    }
    return prev[(cols - 1) * 4 + kBoth];
  }
};

int sample_of(double u, int n) {
  return std::clamp(static_cast<int>(std::floor(u * n)), 0, n - 1);
}

// Recovers the coupling as lattice points and turns it into a monotone
// staircase of sample index pairs.
std::vector<std::pair<int, int>> correspondence(
    const Lattice& a, const Lattice& b, std::size_t j0, std::size_t j1,
    const std::vector<Arrival>& arrivals, int n_a, int n_b) {
  const std::size_t cols = j1 - j0;
  // Walk back over (cell, state) pairs.
  struct Step {
    std::size_t i, j;
    unsigned char state;
  };
  std::vector<Step> steps;
  std::size_t i = a.ang.size() - 1, j = cols - 1;
  unsigned char st = kBoth;
  while (true) {
    steps.push_back({i, j, st});
    const Arrival& arr = arrivals[(i * cols + j) * 4 + st];
    if (arr.move == kStart) break;
    if (arr.move == kDiag) {
      --i, --j;
    } else if (arr.move == kUp) {
      --i;
    } else if (arr.move == kRight) {
      --j;
    }
    st = arr.from_state;
  }
  std::reverse(steps.begin(), steps.end());

  // Coupling point after each step: the far side of every paid interval.
  std::vector<std::pair<double, double>> pts{{0.0, b.at[j0]}};
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const auto& s = steps[k];
    // Only the final state reached in a cell matters.
    if (k + 1 < steps.size() && steps[k + 1].i == s.i && steps[k + 1].j == s.j) {
      continue;
    }
    double u = (s.state & kRowPaid) ? a.at[s.i + 1] : a.at[s.i];
    double v = (s.state & kColPaid) ? b.at[j0 + s.j + 1] : b.at[j0 + s.j];
    if (pts.back() != std::pair{u, v}) pts.emplace_back(u, v);
  }

  std::vector<std::pair<int, int>> out{
      {sample_of(pts[0].first, n_a), sample_of(pts[0].second, n_b)}};
  for (std::size_t k = 1; k < pts.size(); ++k) {
    int ti = sample_of(pts[k].first, n_a), tj = sample_of(pts[k].second, n_b);
    auto [ci, cj] = out.back();
    while (ci < ti || cj < tj) {
      if (ci < ti) ++ci;
      if (cj < tj) ++cj;
      out.emplace_back(ci, cj);
    }
  }
  return out;
}

}  // namespace

DirectionProfile direction_profile(const Polyline& line, int n) {
  if (n < 1) throw std::invalid_argument("direction_profile: n must be >= 1");
  const std::size_t segs = line.segment_count();
  std::vector<double> cum(segs + 1, 0.0);
  std::vector<double> ang(segs);
  for (std::size_t s = 0; s < segs; ++s) {
    Segment seg = line.segment(s);
    cum[s + 1] = cum[s] + seg.length();
    ang[s] = normalize_angle(angle_of(seg.b - seg.a));
  }
  const double total = cum[segs];
  DirectionProfile out;
  out.reserve(static_cast<std::size_t>(n));
  std::size_t s = 0;
  for (int i = 0; i < n; ++i) {
    double pos = (i + 0.5) / n;
    double target = pos * total;
    while (s + 1 < segs && cum[s + 1] <= target) ++s;
    out.push_back({pos, ang[s]});
  }
  return out;
}

MatchResult frechet_on_angles(const std::vector<double>& a,
                              const std::vector<double>& b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("frechet_on_angles: empty profile");
  }
  Lattice la = lattice_of_angles(a), lb = lattice_of_angles(b);
  auto cost = cell_costs(la, lb);
  Solver solver{la, lb, cost, {}, {}};
  std::vector<Arrival> moves;
  MatchResult r;
  r.distance = solver.solve(0, lb.ang.size(), kInf, &moves);
  r.correspondence = correspondence(la, lb, 0, lb.ang.size(), moves,
                                    static_cast<int>(a.size()),
                                    static_cast<int>(b.size()));
  return r;
}

MatchResult integral_frechet(const Polyline& a, const Polyline& b, int n_a,
                             int n_b) {
  if (n_a < 2 || n_b < 2) {
    throw std::invalid_argument("integral_frechet: need >= 2 samples");
  }
  Lattice la = lattice_of(a, 0), lb = lattice_of(b, 0);
  auto cost = cell_costs(la, lb);
  Solver solver{la, lb, cost, {}, {}};
  std::vector<Arrival> moves;
  MatchResult r;
  r.distance = solver.solve(0, lb.ang.size(), kInf, &moves);
  r.correspondence = correspondence(la, lb, 0, lb.ang.size(), moves, n_a, n_b);
  return r;
}

MatchResult integral_frechet(const Polyline& a, const Polyline& b,
                             int n_samples) {
  return integral_frechet(a, b, n_samples, n_samples);
}

double frechet_distance(const Polyline& a, const Polyline& b) {
  Lattice la = lattice_of(a, 0), lb = lattice_of(b, 0);
  auto cost = cell_costs(la, lb);
  Solver solver{la, lb, cost, {}, {}};
  return solver.solve(0, lb.ang.size(), kInf, nullptr);
}

MatchResult partial_frechet(const Polyline& w, const Polyline& p,
                            int n_samples) {
  if (n_samples < 2) {
    throw std::invalid_argument("partial_frechet: need >= 2 samples");
  }
  const int n = n_samples;
  Lattice lw = lattice_of(w, 0), lp = lattice_of(p, n);
  auto cost = cell_costs(lw, lp);
  const std::size_t rows = lw.ang.size(), cols = lp.ang.size();

  // Every row interval and every column interval of the band is entered once,
  // paying at least its cheapest cell. That gives a lower bound per band.
  std::vector<double> col_min(cols, kInf);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      col_min[j] = std::min(col_min[j], cost[i * cols + j]);
    }
  }
  struct Band {
    double lower;
    int start;
    int end;
  };
  std::vector<Band> bands;
  std::vector<double> row_min(rows);
  for (int s = 0; s + 2 <= n; ++s) {
    std::fill(row_min.begin(), row_min.end(), kInf);
    std::size_t j_done = lp.sample_line[static_cast<std::size_t>(s)];
    double col_sum = 0.0;
    for (int e = s + 1; e <= n; ++e) {
      std::size_t j_end = lp.sample_line[static_cast<std::size_t>(e)];
      for (; j_done < j_end; ++j_done) {
        for (std::size_t i = 0; i < rows; ++i) {
          row_min[i] = std::min(row_min[i], cost[i * cols + j_done]);
        }
        col_sum += col_min[j_done] * (lp.at[j_done + 1] - lp.at[j_done]);
      }
      if (e - s < 2) continue;
      double tlen = lp.at[j_end] - lp.at[lp.sample_line[static_cast<std::size_t>(s)]];
      double lb = col_sum / tlen;
      for (std::size_t i = 0; i < rows; ++i) lb += row_min[i] * (lw.at[i + 1] - lw.at[i]);
      bands.push_back({lb, s, e});
    }
  }
  std::stable_sort(bands.begin(), bands.end(),
                   [](const Band& l, const Band& r) { return l.lower < r.lower; });

  Solver solver{lw, lp, cost, {}, {}};
  double best = kInf;
  int best_s = 0, best_e = n;
  for (const auto& band : bands) {
    if (band.lower > best + kTieEps) break;
    std::size_t j0 = lp.sample_line[static_cast<std::size_t>(band.start)];
    std::size_t j1 = lp.sample_line[static_cast<std::size_t>(band.end)];
    double d = solver.solve(j0, j1, best + kTieEps, nullptr);
    if (d == kInf) continue;
    bool better = d < best - kTieEps;
    bool tie = !better && d <= best + kTieEps &&
               std::pair{band.start, best_e - best_s} <
                   std::pair{best_s, band.end - band.start};
    if (better || tie) {
      best = better ? d : std::min(best, d);
      best_s = band.start;
      best_e = band.end;
    }
  }

  std::size_t j0 = lp.sample_line[static_cast<std::size_t>(best_s)];
  std::size_t j1 = lp.sample_line[static_cast<std::size_t>(best_e)];
  std::vector<Arrival> moves;
  MatchResult r;
  r.distance = solver.solve(j0, j1, kInf, &moves);
  r.correspondence = correspondence(lw, lp, j0, j1, moves, n, n);
  r.start = static_cast<double>(best_s) / n;
  r.end = static_cast<double>(best_e) / n;
  return r;
}

}  // namespace shapemap
