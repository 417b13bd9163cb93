#include "hypererg/ball.hpp"

#include <algorithm>
#include <cmath>

#include "hypererg/errors.hpp"

namespace hypererg {

namespace {

[[noreturn]] void cap_exceeded(std::size_t cap) {
  throw ResourceError("ball enumeration exceeds the element cap of " + std::to_string(cap) +
                      " (raise caps.elements or lower the radius)");
}

void check_radius(double R) {
  if (!(R >= 0.0) || !std::isfinite(R)) throw InputError("ball radius must be a finite nonnegative number");
}

std::vector<std::pair<double, std::size_t>> sphere_counts_of(const std::vector<double>& sorted) {
  std::vector<std::pair<double, std::size_t>> out;
  for (double d : sorted) {
    if (!out.empty() && d - out.back().first <= kLengthTol)
      ++out.back().second;
    else
      out.emplace_back(d, 1);
  }
  return out;
}

}  // namespace

bool BallIndex::contains(const Word& g) const {
  return std::any_of(elements.begin(), elements.end(), [&](const BallEntry& e) { return e.g == g; });
}

void for_each_tree_ball(const Metric& metric, double R, std::size_t cap,
                        const std::function<void(const Word&, double)>& visit) {
  check_radius(R);
  if (!metric.is_tree()) throw InputError("tree ball walk needs a tree metric");
  const int n = metric.alphabet().size();
  std::size_t count = 0;
  Word w;
  // Iterative DFS; the stack holds the next letter to try at each depth.
  std::vector<int> next{0};
  std::vector<double> len{0.0};
  if (++count > cap) cap_exceeded(cap);
  visit(w, 0.0);
  while (!next.empty()) {
    int& x = next.back();
    if (x >= n) {
      next.pop_back();
      len.pop_back();
      if (!w.empty()) w.letters.pop_back();
      continue;
    }
    const auto l = static_cast<Letter>(x++);
    if (!w.empty() && l == inv(w.back())) continue;
    const double d = len.back() + metric.letter_weight(l);
    if (d > R + kLengthTol) continue;
    w.letters.push_back(l);
    if (++count > cap) cap_exceeded(cap);
    visit(w, d);
    next.push_back(0);
    len.push_back(d);
  }
}

BallIndex enumerate_ball(const Metric& metric, double R, std::size_t cap) {
  check_radius(R);
  BallIndex ball;
  ball.radius = R;
  if (metric.is_tree()) {
    for_each_tree_ball(metric, R, cap, [&](const Word& w, double d) { ball.elements.push_back({w, d}); });
  } else {
    const int steps = static_cast<int>(std::floor(R + kLengthTol));
    for (auto& [g, d] : altgen_ball(metric.altgen(), steps, cap)) ball.elements.push_back({g, double(d)});
  }
  std::sort(ball.elements.begin(), ball.elements.end(), [](const BallEntry& a, const BallEntry& b) {
    if (std::abs(a.length - b.length) > kLengthTol) return a.length < b.length;
    return a.g < b.g;
  });
  std::vector<double> lengths;
  lengths.reserve(ball.elements.size());
  for (auto& e : ball.elements) lengths.push_back(e.length);
  ball.sphere_counts = sphere_counts_of(lengths);
  return ball;
}

std::vector<double> ball_lengths(const Metric& metric, double R, std::size_t cap) {
  std::vector<double> out;
  if (metric.is_tree()) {
    for_each_tree_ball(metric, R, cap, [&](const Word&, double d) { out.push_back(d); });
  } else {
    check_radius(R);
    const int steps = static_cast<int>(std::floor(R + kLengthTol));
    for (auto& [g, d] : altgen_ball(metric.altgen(), steps, cap)) out.push_back(d);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace hypererg
