// Seeded synthetic transit networks and guide shapes for tests, benchmarks
// and the bundled instances. Output depends only on the arguments.

#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "shapemap/network.hpp"
#include "shapemap/route_matching.hpp"

namespace shapemap::synthetic {

/// Uniform double in [lo, hi) computed from the raw engine output, so the
/// sequence is the same with every standard library.
double uniform(std::mt19937_64& rng, double lo, double hi);
/// Uniform integer in [0, n).
std::size_t index(std::mt19937_64& rng, std::size_t n);

/// cols x rows lattice with spacing 1 and jittered positions; one line per
/// row and per column.
TransitNetwork grid(int cols, int rows, double jitter, std::uint64_t seed);

/// `rings` concentric circular lines crossed by `spokes` radial lines that
/// meet at a hub. Ring k (from 0) has spokes * (k + 1) stations.
TransitNetwork ring(int rings, int spokes, double jitter, std::uint64_t seed);

/// Random planar tree of `stations` stations grown outward from a root, its
/// branches covered by lines.
TransitNetwork tree(int stations, std::uint64_t seed);

/// Metro-like network of about `stations` stations on `lines` lines: each
/// line wanders across the area and shares a station with any earlier line
/// it passes close to.
TransitNetwork metro(int stations, int lines, std::uint64_t seed);

/// Shapes centered at the origin, about 2 units across, with `n` vertices
/// per closed outline.
GuideShape heart(int n = 96);
GuideShape flower(int petals = 5, int n = 160);
/// Lens outline plus a circular pupil as a second polyline.
GuideShape eye(int n = 96);
GuideShape circle(int n = 64);
GuideShape square();
GuideShape stadium(int n = 64);

/// Shape by name: heart, flower, eye, circle, square, stadium. Throws
/// std::invalid_argument for other names.
GuideShape shape_by_name(const std::string& name);

/// Network by kind: grid, ring, tree, metro, with about `stations` stations.
TransitNetwork network_by_kind(const std::string& kind, int stations,
                               std::uint64_t seed);

}  // namespace shapemap::synthetic
