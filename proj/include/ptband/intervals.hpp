#pragma once

#include <algorithm>
#include <vector>

namespace ptband {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool empty() const { return !(lo < hi); }
  double length() const { return empty() ? 0.0 : hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

// Sort and merge overlapping/touching intervals, dropping empty ones.
inline std::vector<Interval> merge_union(std::vector<Interval> v) {
  std::erase_if(v, [](const Interval& a) { return a.empty(); });
  std::sort(v.begin(), v.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const Interval& a : v) {
    if (!out.empty() && a.lo <= out.back().hi)
      out.back().hi = std::max(out.back().hi, a.hi);
    else
      out.push_back(a);
  }
  return out;
}

inline double total_length(const std::vector<Interval>& v) {
  double s = 0.0;
  for (const Interval& a : v) s += a.length();
  return s;
}

inline std::vector<Interval> intersect(const std::vector<Interval>& a,
                                       const std::vector<Interval>& b) {
  std::vector<Interval> out;
  for (const Interval& x : a)
    for (const Interval& y : b) {
      Interval z{std::max(x.lo, y.lo), std::min(x.hi, y.hi)};
      if (!z.empty()) out.push_back(z);
    }
  return merge_union(out);
}

// Complement of a union of intervals inside [lo, hi].
inline std::vector<Interval> complement_in(std::vector<Interval> u, double lo,
                                           double hi) {
  u = merge_union(std::move(u));
  std::vector<Interval> out;
  double cur = lo;
  for (const Interval& a : u) {
    if (a.hi <= lo || a.lo >= hi) continue;
    if (a.lo > cur) out.push_back({cur, std::min(a.lo, hi)});
    cur = std::max(cur, a.hi);
    if (cur >= hi) break;
  }
  if (cur < hi) out.push_back({cur, hi});
  std::erase_if(out, [](const Interval& a) { return a.empty(); });
  return out;
}

inline bool covered(const std::vector<Interval>& merged, double x) {
  auto it = std::upper_bound(
      merged.begin(), merged.end(), x,
      [](double v, const Interval& a) { return v < a.lo; });
  if (it == merged.begin()) return false;
  --it;
  return it->contains(x);
}

} // namespace ptband
