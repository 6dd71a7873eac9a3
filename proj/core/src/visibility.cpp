#include <algorithm>
#include <utility>
#include <vector>

#include "ecggin/error.hpp"
#include "ecggin/series.hpp"
#include "ecggin/transforms.hpp"

namespace ecggin {

namespace {

Graph chain_graph_shell(std::span<const double> s) {
  require_finite(s);
  Graph g;
  g.num_nodes = static_cast<int>(s.size());
  g.directed = false;
  return g;
}

}  // namespace

Graph nvg_naive(std::span<const double> s) {
  Graph g = chain_graph_shell(s);
  const std::size_t n = s.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      bool visible = true;
      for (std::size_t c = a + 1; c < b && visible; ++c) {
        visible = below_sight_line(a, s[a], b, s[b], c, s[c]);
      }
      if (visible) g.edges.push_back({static_cast<int>(a), static_cast<int>(b), 1.0});
    }
  }
  return g;
}

Graph nvg_fast(std::span<const double> s) {
  Graph g = chain_graph_shell(s);
  const std::size_t n = s.size();

  // Seen from the range maximum m, a sample is visible iff its sight line
  // rises above that of every sample between them; the last visible sample
  // is therefore the only one that can block the next candidate.
  std::vector<std::pair<std::size_t, std::size_t>> pending;  // inclusive ranges
  if (n > 1) pending.emplace_back(0, n - 1);
  while (!pending.empty()) {
    const auto [lo, hi] = pending.back();
    pending.pop_back();
    const auto m = static_cast<std::size_t>(
        std::max_element(s.begin() + static_cast<std::ptrdiff_t>(lo), s.begin() + static_cast<std::ptrdiff_t>(hi) + 1) -
        s.begin());

    if (m > lo) {
      std::size_t last = m - 1;
      g.edges.push_back({static_cast<int>(last), static_cast<int>(m), 1.0});
      for (std::size_t a = m - 1; a-- > lo;) {
        if (below_sight_line(a, s[a], m, s[m], last, s[last])) {
          g.edges.push_back({static_cast<int>(a), static_cast<int>(m), 1.0});
          last = a;
        }
      }
      if (m - 1 > lo) pending.emplace_back(lo, m - 1);
    }
    if (m < hi) {
      std::size_t last = m + 1;
      g.edges.push_back({static_cast<int>(m), static_cast<int>(last), 1.0});
      for (std::size_t b = m + 2; b <= hi; ++b) {
        if (below_sight_line(m, s[m], b, s[b], last, s[last])) {
          g.edges.push_back({static_cast<int>(m), static_cast<int>(b), 1.0});
          last = b;
        }
      }
      if (hi > m + 1) pending.emplace_back(m + 1, hi);
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

Graph hvg_transform(std::span<const double> s) {
  Graph g = chain_graph_shell(s);
  // Stack values are strictly decreasing from bottom to top; everything
  // lower than the incoming sample sees it and is then hidden behind it.
  std::vector<std::size_t> stack;
  for (std::size_t b = 0; b < s.size(); ++b) {
    while (!stack.empty() && s[stack.back()] < s[b]) {
      g.edges.push_back({static_cast<int>(stack.back()), static_cast<int>(b), 1.0});
      stack.pop_back();
    }
    if (!stack.empty()) {
      g.edges.push_back({static_cast<int>(stack.back()), static_cast<int>(b), 1.0});
      if (s[stack.back()] == s[b]) stack.pop_back();
    }
    stack.push_back(b);
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

}  // namespace ecggin
