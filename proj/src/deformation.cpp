#include "shapemap/deformation.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <array>
#include <functional>
#include <numeric>
#include <set>
#include <stdexcept>

namespace shapemap {

namespace {

// Proximal weight keeping every linearized system positive definite.
constexpr double kProximal = 1e-6;
constexpr int kMaxHalvings = 10;
constexpr int kHoldIterations = 3;
constexpr double kGuardWeight = 1.0;
constexpr double kSectorAngle = kPi / 4;

struct Mat2 {
  double a = 0, b = 0, c = 0, d = 0;  // [[a b] [c d]]

  static Mat2 identity(double s = 1.0) { return {s, 0, 0, s}; }
  // s * I + t * perp
  static Mat2 turn(double s, double t) { return {s, -t, t, s}; }
  Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
  Point operator*(Point p) const { return {a * p.x + b * p.y, c * p.x + d * p.y}; }
  Mat2 transposed() const { return {a, c, b, d}; }
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c,
            c * o.b + d * o.d};
  }
};

// weight * |sum_k M_k x_{s_k} - b|^2
struct Term {
  double weight = 0.0;
  std::array<std::pair<std::size_t, Mat2>, 3> parts{};
  int count = 0;
  Point b;
};

class LinearSystem {
 public:
  explicit LinearSystem(std::size_t n) : n_(n) {}

  void add(double w, std::initializer_list<std::pair<std::size_t, Mat2>> parts,
           Point b) {
    if (w <= 0.0) return;
    Term t;
    t.weight = w;
    for (const auto& p : parts) t.parts[t.count++] = p;
    t.b = b;
    terms_.push_back(t);
  }

  std::vector<Point> solve() const {
    const auto dim = static_cast<Eigen::Index>(2 * n_);
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
    for (const auto& t : terms_) {
      for (int p = 0; p < t.count; ++p) {
        const auto& [sp, mp] = t.parts[p];
        Mat2 mpt = mp.transposed();
        Point r = mpt * t.b;
        rhs[2 * sp] += t.weight * r.x;
        rhs[2 * sp + 1] += t.weight * r.y;
        for (int q = 0; q < t.count; ++q) {
          const auto& [sq, mq] = t.parts[q];
          Mat2 blk = (mpt * mq) * t.weight;
          auto row = static_cast<Eigen::Index>(2 * sp);
          auto col = static_cast<Eigen::Index>(2 * sq);
          trip.emplace_back(row, col, blk.a);
          trip.emplace_back(row, col + 1, blk.b);
          trip.emplace_back(row + 1, col, blk.c);
          trip.emplace_back(row + 1, col + 1, blk.d);
        }
      }
    }
    Eigen::SparseMatrix<double> a(dim, dim);
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(a);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("deformation: least-squares system is singular");
    }
    Eigen::VectorXd x = solver.solve(rhs);
    std::vector<Point> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = {x[2 * i], x[2 * i + 1]};
    return out;
  }

 private:
  std::size_t n_;
  std::vector<Term> terms_;
};

Point unit(Point v) {
  double l = norm(v);
  return l > 0.0 ? v * (1.0 / l) : Point{};
}

Point sector_dir(int k) {
  constexpr double h = 0.70710678118654752440;
  static constexpr Point kDirs[8] = {{1, 0},  {h, h},   {0, 1},  {-h, h},
                                     {-1, 0}, {-h, -h}, {0, -1}, {h, -h}};
  return kDirs[k];
}

ClosestPoint nearest_on_shape(const GuideShape& shape, Point p) {
  ClosestPoint best;
  best.distance = std::numeric_limits<double>::infinity();
  for (const auto& line : shape.polylines()) {
    ClosestPoint cp = closest_point(line, p);
    if (cp.distance < best.distance) best = cp;
  }
  return best;
}

// Consecutive neighbour pairs (j, k), k counter-clockwise after j, around
// every station of degree >= 2.
struct AnglePair {
  std::size_t i, j, k;
  double t;  // tan((pi - theta_i) / 2)
};

std::vector<AnglePair> angle_pairs(const TransitNetwork& net,
                                   const std::vector<Point>& x) {
  std::vector<AnglePair> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& inc = net.incident(i);
    const std::size_t deg = inc.size();
    if (deg < 2) continue;
    std::vector<std::pair<double, std::size_t>> nb;
    for (std::size_t c : inc) {
      std::size_t j = net.other_end(c, i);
      nb.emplace_back(angle_of(x[j] - x[i]), j);
    }
    std::sort(nb.begin(), nb.end());
    const double theta = 2 * kPi / static_cast<double>(deg);
    const double t = deg == 2 ? 0.0 : std::tan((kPi - theta) / 2);
    const std::size_t pairs = deg == 2 ? 1 : deg;
    for (std::size_t q = 0; q < pairs; ++q) {
      out.push_back({i, nb[q].second, nb[(q + 1) % deg].second, t});
    }
  }
  return out;
}

Point angle_residual(const AnglePair& p, const std::vector<Point>& x) {
  Point c = (x[p.k] - x[p.j]) * 0.5;
  return x[p.i] - x[p.j] - c - perp(c) * p.t;
}

void add_angle_terms(LinearSystem& sys, double w,
                     const std::vector<AnglePair>& pairs) {
  for (const auto& p : pairs) {
    // x_i - x_j - (I + t perp)(x_k - x_j) / 2
    sys.add(w,
            {{p.i, Mat2::identity()},
             {p.j, Mat2::turn(-0.5, p.t * 0.5)},
             {p.k, Mat2::turn(-0.5, -p.t * 0.5)}},
            {});
  }
}

double sq(Point p) { return dot(p, p); }

double closeness_energy(const TransitNetwork& net, const GuideShape& shape,
                        const std::vector<Point>& x,
                        const std::vector<char>& shape_stations) {
  double e = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!shape_stations[i]) continue;
    double d = nearest_on_shape(shape, x[i]).distance;
    e += static_cast<double>(net.degree(i)) * d * d;
  }
  return e;
}

double anchor_energy(const std::vector<Point>& x,
                     const std::vector<Point>& anchor) {
  double e = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) e += sq(x[i] - anchor[i]);
  return e;
}

void add_closeness_terms(LinearSystem& sys, double w, const TransitNetwork& net,
                         const GuideShape& shape, const std::vector<Point>& x,
                         const std::vector<char>& shape_stations) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!shape_stations[i]) continue;
    sys.add(w * static_cast<double>(net.degree(i)), {{i, Mat2::identity()}},
            nearest_on_shape(shape, x[i]).point);
  }
}

void add_anchor_terms(LinearSystem& sys, double w,
                      const std::vector<Point>& anchor) {
  for (std::size_t i = 0; i < anchor.size(); ++i) {
    sys.add(w, {{i, Mat2::identity()}}, anchor[i]);
  }
}

// Octolinear deviation of one edge: squared distance from its vector to the
// sector ray.
double sector_deviation(Point d, int k) {
  Point u = sector_dir(k);
  double l = std::max(dot(d, u), 0.0);
  return sq(d - u * l);
}

struct Hold {
  std::size_t station;
  Point pos;
  int remaining;
};

// Shared iteration driver for both stages.
struct Stage {
  std::function<void(const LayoutState&, LinearSystem&)> linearize;
  std::function<double(const LayoutState&)> energy;
  // Recomputes state-dependent data (shape assignment) after a move.
  std::function<void(LayoutState&)> refresh;
};

LayoutState iterate(LayoutState state, const TransitNetwork& net,
                    const Stage& stage, int max_iter, double L,
                    const DeformOptions& options) {
  const std::size_t n = state.positions.size();
  state.iteration = 0;
  state.reverted.clear();
  stage.refresh(state);
  state.energy = stage.energy(state);
  state.energy_history = {state.energy};
  state.crossing_history.clear();
  if (n == 0) return state;

  std::vector<Hold> holds;
  for (int it = 0; it < max_iter; ++it) {
    LinearSystem sys(n);
    stage.linearize(state, sys);
    for (std::size_t i = 0; i < n; ++i) {
      sys.add(kProximal, {{i, Mat2::identity()}}, state.positions[i]);
    }
    for (const auto& h : holds) {
      sys.add(kGuardWeight, {{h.station, Mat2::identity()}}, h.pos);
    }
    for (const auto& v : proximity_violations(net, state.positions, L / 4)) {
      sys.add(kGuardWeight, {{v.station, Mat2::identity()}}, v.target);
    }
    const std::vector<Point> target = sys.solve();

    std::optional<LayoutState> accepted;
    double alpha = 1.0;
    for (int h = 0; h <= kMaxHalvings; ++h, alpha *= 0.5) {
      LayoutState cand = state;
      for (std::size_t i = 0; i < n; ++i) {
        cand.positions[i] =
            state.positions[i] + (target[i] - state.positions[i]) * alpha;
      }
      cand = planarity_guard(state, std::move(cand), net);
      stage.refresh(cand);
      double e = stage.energy(cand);
      if (e <= state.energy) {
        cand.energy = e;
        accepted = std::move(cand);
        break;
      }
    }
    if (!accepted) break;

    std::erase_if(holds, [](Hold& h) { return --h.remaining <= 0; });
    for (std::size_t s : accepted->reverted) {
      holds.push_back({s, accepted->positions[s], kHoldIterations});
    }
    const double before = state.energy;
    state = std::move(*accepted);
    state.iteration = it + 1;
    state.energy_history.push_back(state.energy);
    state.crossing_history.push_back(count_crossings(net, state.positions));
    double rel = before > 0.0 ? (before - state.energy) / before : 0.0;
    if (options.on_accept) options.on_accept(state);
    if (rel < options.tol) break;
  }
  return state;
}

bool split_fragments(const TransitNetwork& net, std::size_t a, std::size_t b) {
  const auto& oa = net.stations()[a].origin;
  return !oa.empty() && oa == net.stations()[b].origin;
}

}  // namespace

// _____________________________________________________________________________
LayoutState initial_state(const TransitNetwork& net) {
  LayoutState s;
  s.positions = net.positions();
  s.shape_stations.assign(net.stations().size(), 0);
  s.shape_edges.assign(net.connections().size(), 0);
  s.sectors.assign(net.connections().size(), kNoSector);
  return s;
}

double target_length(const TransitNetwork& net, const DeformWeights& weights) {
  double L = weights.L > 0.0 ? weights.L : net.average_connection_length();
  if (!(L > 0.0)) {
    throw std::invalid_argument("deformation: target edge length must be positive");
  }
  return L;
}

double connection_target(const TransitNetwork& net, std::size_t c, double L) {
  const auto& conn = net.connections()[c];
  if (conn.kind != ConnectionKind::Real) return L / 2;
  for (std::size_t s : {net.from_index(c), net.to_index(c)}) {
    if (net.stations()[s].kind != StationKind::Real) return L / 2;
  }
  return L;
}

LayoutState assign_shape_stations(LayoutState state, const TransitNetwork& net,
                                  const GuideShape& shape) {
  const auto& x = state.positions;
  const auto& conns = net.connections();
  const std::size_t n = x.size();
  std::vector<BBox> boxes(conns.size());
  for (std::size_t c = 0; c < conns.size(); ++c) {
    boxes[c] = BBox::of({x[net.from_index(c)], x[net.to_index(c)]});
  }
  state.shape_stations.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    Point p = nearest_on_shape(shape, x[i]).point;
    Segment mirror{x[i], p * 2.0 - x[i]};
    BBox mb = BBox::of({mirror.a, mirror.b});
    bool blocked = false;
    for (std::size_t c = 0; c < conns.size() && !blocked; ++c) {
      const BBox& b = boxes[c];
      if (b.max_x < mb.min_x || b.min_x > mb.max_x || b.max_y < mb.min_y ||
          b.min_y > mb.max_y) {
        continue;
      }
      bool incident = net.from_index(c) == i || net.to_index(c) == i;
      Segment seg{x[net.from_index(c)], x[net.to_index(c)]};
      blocked = segments_intersect(mirror, seg, incident);
    }
    state.shape_stations[i] = blocked ? 0 : 1;
  }
  state.shape_edges.assign(conns.size(), 0);
  for (std::size_t c = 0; c < conns.size(); ++c) {
    state.shape_edges[c] = state.shape_stations[net.from_index(c)] &&
                           state.shape_stations[net.to_index(c)];
  }
  return state;
}

double smooth_energy(const LayoutState& state, const TransitNetwork& net,
                     const GuideShape& shape, const DeformWeights& weights) {
  const auto& w = weights.smooth;
  const auto& x = state.positions;
  const double L = target_length(net, weights);
  LayoutState assigned = assign_shape_stations(state, net, shape);

  double e_c = closeness_energy(net, shape, x, assigned.shape_stations);
  double e_l = 0.0;
  for (std::size_t c = 0; c < net.connections().size(); ++c) {
    double len = dist(x[net.from_index(c)], x[net.to_index(c)]);
    double d = len - connection_target(net, c, L);
    e_l += d * d;
  }
  double e_a = 0.0;
  for (const auto& p : angle_pairs(net, x)) e_a += sq(angle_residual(p, x));
  double e_p = anchor_energy(x, net.positions());
  return w.w_c * e_c + w.w_l * e_l + w.w_a * e_a + w.w_p * e_p;
}

namespace {

void linearize_smooth(const LayoutState& state, const TransitNetwork& net,
                      const GuideShape& shape, const DeformWeights& weights,
                      double L, LinearSystem& sys) {
  const auto& w = weights.smooth;
  const auto& x = state.positions;
  const auto geo = net.positions();
  add_closeness_terms(sys, w.w_c, net, shape, x, state.shape_stations);
  for (std::size_t c = 0; c < net.connections().size(); ++c) {
    std::size_t i = net.from_index(c), j = net.to_index(c);
    Point dir = unit(x[i] - x[j]);
    if (dir == Point{}) dir = unit(geo[i] - geo[j]);
    if (dir == Point{}) dir = {1.0, 0.0};
    sys.add(w.w_l, {{i, Mat2::identity()}, {j, Mat2::identity(-1.0)}},
            dir * connection_target(net, c, L));
  }
  add_angle_terms(sys, w.w_a, angle_pairs(net, x));
  add_anchor_terms(sys, w.w_p, geo);
}

}  // namespace

LayoutState smooth_step(const LayoutState& state, const TransitNetwork& net,
                        const GuideShape& shape, const DeformWeights& weights) {
  const double L = target_length(net, weights);
  LayoutState cur = assign_shape_stations(state, net, shape);
  LinearSystem sys(cur.positions.size());
  linearize_smooth(cur, net, shape, weights, L, sys);
  for (std::size_t i = 0; i < cur.positions.size(); ++i) {
    sys.add(kProximal, {{i, Mat2::identity()}}, cur.positions[i]);
  }
  LayoutState next = cur;
  next.positions = sys.solve();
  next = assign_shape_stations(std::move(next), net, shape);
  next.energy = smooth_energy(next, net, shape, weights);
  next.iteration = state.iteration + 1;
  return next;
}

LayoutState run_smooth(const TransitNetwork& net, const GuideShape& shape,
                       const DeformWeights& weights,
                       const DeformOptions& options) {
  const double L = target_length(net, weights);
  Stage stage;
  stage.refresh = [&](LayoutState& s) {
    s = assign_shape_stations(std::move(s), net, shape);
  };
  stage.energy = [&](const LayoutState& s) {
    return smooth_energy(s, net, shape, weights);
  };
  stage.linearize = [&](const LayoutState& s, LinearSystem& sys) {
    linearize_smooth(s, net, shape, weights, L, sys);
  };
  return iterate(initial_state(net), net, stage, options.max_iter_smooth, L,
                 options);
}

// _____________________________________________________________________________
double sector_rotation(double angle, int k) {
  return angle_diff(angle, k * kSectorAngle);
}

int nearest_sector(double angle) {
  long k = std::lround(angle / kSectorAngle);
  return static_cast<int>(((k % 8) + 8) % 8);
}

std::vector<int> min_cost_assignment(
    const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  if (n == 0) return {};
  const std::size_t m = cost[0].size();
  if (m < n) {
    throw std::invalid_argument("assignment needs at least as many columns as rows");
  }
  // Shortest augmenting path with potentials; 1-based with column 0 as root.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> row_of(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    row_of[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      std::size_t i0 = row_of[j0], j1 = 0;
      double delta = kInf;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[row_of[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of[j0] != 0);
    do {
      std::size_t j1 = way[j0];
      row_of[j0] = row_of[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> out(n, -1);
  for (std::size_t j = 1; j <= m; ++j) {
    if (row_of[j] != 0) out[row_of[j] - 1] = static_cast<int>(j - 1);
  }
  return out;
}

std::vector<int> assign_station_sectors(
    const std::vector<double>& directions,
    const std::vector<std::optional<int>>& fixed) {
  const std::size_t n = directions.size();
  if (n > 8) {
    throw std::invalid_argument("a station has at most 8 octolinear edges");
  }
  std::vector<int> out(n, kNoSector);
  std::array<bool, 8> taken{};
  for (std::size_t e = 0; e < n && e < fixed.size(); ++e) {
    if (!fixed[e]) continue;
    int k = *fixed[e];
    if (k < 0 || k > 7 || taken[k]) {
      throw std::invalid_argument("fixed sectors conflict");
    }
    taken[k] = true;
    out[e] = k;
  }
  std::vector<std::size_t> free_edges;
  for (std::size_t e = 0; e < n; ++e) {
    if (out[e] == kNoSector) free_edges.push_back(e);
  }
  std::vector<int> free_sectors;
  for (int k = 0; k < 8; ++k) {
    if (!taken[k]) free_sectors.push_back(k);
  }
  std::vector<std::vector<double>> cost;
  for (std::size_t e : free_edges) {
    std::vector<double> row;
    for (int k : free_sectors) row.push_back(sector_rotation(directions[e], k));
    cost.push_back(std::move(row));
  }
  auto pick = min_cost_assignment(cost);
  for (std::size_t r = 0; r < free_edges.size(); ++r) {
    out[free_edges[r]] = free_sectors[static_cast<std::size_t>(pick[r])];
  }
  return out;
}

namespace {

// Sector of connection c seen from station s.
int sector_at(const TransitNetwork& net, std::size_t c, std::size_t s, int k) {
  return net.from_index(c) == s ? k : (k + 4) % 8;
}

bool station_conflicted(const LayoutState& state, const TransitNetwork& net,
                        std::size_t s) {
  std::array<bool, 8> seen{};
  for (std::size_t c : net.incident(s)) {
    int k = state.sectors[c];
    if (k == kNoSector) continue;
    int local = sector_at(net, c, s, k);
    if (seen[local]) return true;
    seen[local] = true;
  }
  return false;
}

}  // namespace

LayoutState assign_octolinear_sectors(LayoutState state,
                                      const TransitNetwork& net) {
  const auto& x = state.positions;
  const std::size_t nc = net.connections().size();
  state.sectors.assign(nc, kNoSector);
  for (std::size_t c = 0; c < nc; ++c) {
    if (state.shape_edges[c]) continue;
    state.sectors[c] = nearest_sector(angle_of(x[net.to_index(c)] - x[net.from_index(c)]));
  }

  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return net.degree(a) > net.degree(b);
  });

  // First pass resolves stations in order of decreasing degree; an edge
  // settled at one end is fixed at the other. Later passes repair stations
  // whose fixed edges collided.
  std::vector<char> locked(nc, 0);
  for (int pass = 0; pass < 16; ++pass) {
    bool changed = false;
    for (std::size_t s : order) {
      if (pass > 0 && !station_conflicted(state, net, s)) continue;
      std::vector<std::size_t> edges;
      std::vector<double> dirs;
      std::vector<std::optional<int>> fixed;
      for (std::size_t c : net.incident(s)) {
        if (state.shape_edges[c]) continue;
        edges.push_back(c);
        dirs.push_back(angle_of(x[net.other_end(c, s)] - x[s]));
        fixed.push_back(locked[c] ? std::optional<int>(sector_at(
                                        net, c, s, state.sectors[c]))
                                  : std::nullopt);
      }
      if (edges.empty()) continue;
      std::array<int, 8> count{};
      bool clash = false;
      for (const auto& f : fixed) {
        if (f && ++count[*f] > 1) clash = true;
      }
      if (clash || pass > 0) {
        for (auto& f : fixed) f.reset();
      }
      auto ks = assign_station_sectors(dirs, fixed);
      for (std::size_t e = 0; e < edges.size(); ++e) {
        int global = sector_at(net, edges[e], s, ks[e]);
        if (state.sectors[edges[e]] != global) changed = true;
        state.sectors[edges[e]] = global;
        locked[edges[e]] = 1;
      }
    }
    if (pass > 0 && !changed) break;
    if (sector_conflicts(state, net) == 0) break;
  }
  return state;
}

std::size_t sector_conflicts(const LayoutState& state, const TransitNetwork& net) {
  std::size_t n = 0;
  for (std::size_t s = 0; s < state.positions.size(); ++s) {
    if (station_conflicted(state, net, s)) ++n;
  }
  return n;
}

double mixed_energy(const LayoutState& state, const TransitNetwork& net,
                    const GuideShape& shape, const DeformWeights& weights,
                    const std::vector<Point>& anchor) {
  const auto& w = weights.mixed;
  const auto& x = state.positions;
  double e_o = 0.0;
  for (std::size_t c = 0; c < net.connections().size(); ++c) {
    if (state.sectors[c] == kNoSector) continue;
    e_o += sector_deviation(x[net.to_index(c)] - x[net.from_index(c)],
                            state.sectors[c]);
  }
  double e_c = closeness_energy(net, shape, x, state.shape_stations);
  double e_p = anchor_energy(x, anchor);
  return w.w_o * e_o + w.w_p * e_p + w.w_c * e_c;
}

LayoutState run_mixed(const LayoutState& smooth, const TransitNetwork& net,
                      const GuideShape& shape, const DeformWeights& weights,
                      const DeformOptions& options) {
  const double L = target_length(net, weights);
  const std::vector<Point> anchor = smooth.positions;
  LayoutState start = assign_octolinear_sectors(smooth, net);
  const auto& w = weights.mixed;
  Stage stage;
  stage.refresh = [](LayoutState&) {};
  stage.energy = [&](const LayoutState& s) {
    return mixed_energy(s, net, shape, weights, anchor);
  };
  stage.linearize = [&](const LayoutState& s, LinearSystem& sys) {
    const auto& x = s.positions;
    for (std::size_t c = 0; c < net.connections().size(); ++c) {
      if (s.sectors[c] == kNoSector) continue;
      std::size_t a = net.from_index(c), b = net.to_index(c);
      Point u = sector_dir(s.sectors[c]);
      double l = std::max(dot(x[b] - x[a], u), 0.0);
      sys.add(w.w_o, {{b, Mat2::identity()}, {a, Mat2::identity(-1.0)}}, u * l);
    }
    add_closeness_terms(sys, w.w_c, net, shape, x, s.shape_stations);
    add_anchor_terms(sys, w.w_p, anchor);
  };
  return iterate(std::move(start), net, stage, options.max_iter_mixed, L,
                 options);
}

// _____________________________________________________________________________
LayoutState planarity_guard(const LayoutState& prev, LayoutState next,
                            const TransitNetwork& net) {
  const auto before = crossing_pairs(net, prev.positions);
  const std::set<std::pair<std::size_t, std::size_t>> known(before.begin(),
                                                            before.end());
  std::set<std::size_t> reverted;
  while (true) {
    bool any = false;
    bool moved = false;
    for (auto [c1, c2] : crossing_pairs(net, next.positions)) {
      if (known.count({c1, c2})) continue;
      any = true;
      for (std::size_t s : {net.from_index(c1), net.to_index(c1),
                            net.from_index(c2), net.to_index(c2)}) {
        if (next.positions[s] != prev.positions[s]) {
          next.positions[s] = prev.positions[s];
          reverted.insert(s);
          moved = true;
        }
      }
    }
    if (!any) break;
    if (!moved) {
      // Unreachable for a consistent sweep; fall back to the previous layout.
      next.positions = prev.positions;
      break;
    }
  }
  next.reverted.assign(reverted.begin(), reverted.end());
  return next;
}

std::vector<ProximityViolation> proximity_violations(
    const TransitNetwork& net, const std::vector<Point>& positions,
    double threshold) {
  std::vector<ProximityViolation> out;
  const auto& conns = net.connections();
  for (std::size_t s = 0; s < positions.size(); ++s) {
    const Point p = positions[s];
    for (std::size_t c = 0; c < conns.size(); ++c) {
      std::size_t a = net.from_index(c), b = net.to_index(c);
      if (a == s || b == s) continue;
      if (split_fragments(net, s, a) || split_fragments(net, s, b)) continue;
      const Point pa = positions[a], pb = positions[b];
      if (std::max(pa.x, pb.x) < p.x - threshold ||
          std::min(pa.x, pb.x) > p.x + threshold ||
          std::max(pa.y, pb.y) < p.y - threshold ||
          std::min(pa.y, pb.y) > p.y + threshold) {
        continue;
      }
      Point q = closest_point_on_segment({pa, pb}, p);
      double d = dist(p, q);
      if (!(d < threshold) || d == 0.0) continue;
      out.push_back({s, c, q + unit(p - q) * threshold});
    }
  }
  return out;
}

}  // namespace shapemap
