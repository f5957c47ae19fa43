#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

namespace specnet {

using Complex = std::complex<double>;

inline double cross2(Complex a, Complex b) {
  return a.real() * b.imag() - a.imag() * b.real();
}

struct SegmentHit {
  double t;  // parameter on [p1, p2]
  double u;  // parameter on [q1, q2]
  Complex point;
};

// Proper transversal intersection of two segments (parallel pairs report
// nothing; overlaps are handled by the caller's overlap scan).
inline std::optional<SegmentHit> segment_intersection(Complex p1, Complex p2,
                                                      Complex q1, Complex q2) {
  const Complex r = p2 - p1;
  const Complex s = q2 - q1;
  const double denom = cross2(r, s);
  const double scale = std::abs(r) * std::abs(s);
  if (std::abs(denom) < 1e-14 * (scale + 1e-300)) return std::nullopt;
  const Complex d = q1 - p1;
  const double t = cross2(d, s) / denom;
  const double u = cross2(d, r) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return SegmentHit{t, u, p1 + t * r};
}

inline double point_segment_distance(Complex p, Complex a, Complex b) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  double t = ((p - a).real() * ab.real() + (p - a).imag() * ab.imag()) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

// Uniform-grid index over line segments keyed by integer cells.
class SegmentGrid {
 public:
  explicit SegmentGrid(double cell) : cell_(cell > 0 ? cell : 1.0) {}

  struct Segment {
    Complex a, b;
    int owner;  // caller-defined id (wall id)
    int index;  // caller-defined sub-index (segment number)
  };

  void insert(Complex a, Complex b, int owner, int index) {
    const int id = static_cast<int>(segments_.size());
    segments_.push_back({a, b, owner, index});
    for_cells(a, b, [&](int64_t key) { cells_[key].push_back(id); });
  }

  const std::vector<Segment>& segments() const { return segments_; }

  // Candidate segment ids whose cells overlap the query segment's cells.
  std::vector<int> candidates(Complex a, Complex b) const {
    std::vector<int> out;
    for_cells(a, b, [&](int64_t key) {
      auto it = cells_.find(key);
      if (it == cells_.end()) return;
      out.insert(out.end(), it->second.begin(), it->second.end());
    });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::vector<int> candidates_near(Complex p, double radius) const {
    return candidates(p - Complex(radius, radius), p + Complex(radius, radius));
  }

  double cell_size() const { return cell_; }

 private:
  template <class F>
  void for_cells(Complex a, Complex b, F&& f) const {
    const double x0 = std::min(a.real(), b.real()) - 0.5 * cell_;
    const double x1 = std::max(a.real(), b.real()) + 0.5 * cell_;
    const double y0 = std::min(a.imag(), b.imag()) - 0.5 * cell_;
    const double y1 = std::max(a.imag(), b.imag()) + 0.5 * cell_;
    for (int64_t ix = cell_index(x0); ix <= cell_index(x1); ++ix)
      for (int64_t iy = cell_index(y0); iy <= cell_index(y1); ++iy)
        f(pack(ix, iy));
  }

  int64_t cell_index(double v) const {
    return static_cast<int64_t>(std::floor(v / cell_));
  }
  static int64_t pack(int64_t ix, int64_t iy) {
    return (ix << 32) ^ (iy & 0xffffffffll);
  }

  double cell_;
  std::vector<Segment> segments_;
  std::unordered_map<int64_t, std::vector<int>> cells_;
};

// Largest distance from any point of `pts` to the polylines in `lines`
// (point-to-segment, so discretization of the target does not inflate it).
inline double directed_hausdorff(const std::vector<Complex>& pts,
                                 const std::vector<std::vector<Complex>>& lines,
                                 double cell) {
  SegmentGrid grid(cell);
  for (size_t w = 0; w < lines.size(); ++w)
    for (size_t i = 0; i + 1 < lines[w].size(); ++i)
      grid.insert(lines[w][i], lines[w][i + 1], static_cast<int>(w),
                  static_cast<int>(i));
  double worst = 0.0;
  for (const auto& p : pts) {
    double best = std::numeric_limits<double>::infinity();
    for (double radius = cell; std::isinf(best); radius *= 2.0) {
      for (int id : grid.candidates_near(p, radius)) {
        const auto& s = grid.segments()[id];
        best = std::min(best, point_segment_distance(p, s.a, s.b));
      }
      if (radius > 1e9) break;
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace specnet
