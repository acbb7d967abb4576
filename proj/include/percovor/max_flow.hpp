#ifndef PERCOVOR_MAX_FLOW_HPP
#define PERCOVOR_MAX_FLOW_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

namespace percovor {

/// Dinic's algorithm on an integer-capacity directed graph.
class MaxFlow {
 public:
  struct Arc {
    std::uint32_t to;
    std::int32_t capacity;
    std::int32_t flow;
  };

  explicit MaxFlow(std::size_t nodes) : head_(nodes) {}

  std::size_t add_arc(std::uint32_t from, std::uint32_t to, std::int32_t capacity) {
    const std::size_t id = arcs_.size();
    arcs_.push_back({to, capacity, 0});
    arcs_.push_back({from, 0, 0});
    head_[from].push_back(id);
    head_[to].push_back(id + 1);
    return id;
  }

  std::int64_t run(std::uint32_t source, std::uint32_t sink) {
    std::int64_t total = 0;
    while (bfs(source, sink)) {
      next_.assign(head_.size(), 0);
      while (const std::int32_t pushed = dfs(source, sink, std::numeric_limits<std::int32_t>::max())) total += pushed;
    }
    return total;
  }

  [[nodiscard]] const Arc& arc(std::size_t id) const noexcept { return arcs_[id]; }
  [[nodiscard]] const std::vector<std::size_t>& out_arcs(std::uint32_t v) const noexcept { return head_[v]; }
  [[nodiscard]] std::size_t node_count() const noexcept { return head_.size(); }

  /// Reduces the flow on an arc by one; used when peeling off flow paths.
  void consume(std::size_t id) noexcept {
    --arcs_[id].flow;
    ++arcs_[id ^ 1].flow;
  }

 private:
  bool bfs(std::uint32_t source, std::uint32_t sink) {
    level_.assign(head_.size(), -1);
    std::vector<std::uint32_t> queue{source};
    level_[source] = 0;
    for (std::size_t i = 0; i < queue.size(); ++i) {
      const std::uint32_t v = queue[i];
      for (const std::size_t id : head_[v]) {
        const Arc& a = arcs_[id];
        if (a.capacity > a.flow && level_[a.to] < 0) {
          level_[a.to] = level_[v] + 1;
          queue.push_back(a.to);
        }
      }
    }
    return level_[sink] >= 0;
  }

  std::int32_t dfs(std::uint32_t v, std::uint32_t sink, std::int32_t limit) {
    if (v == sink) return limit;
    for (std::size_t& i = next_[v]; i < head_[v].size(); ++i) {
      const std::size_t id = head_[v][i];
      Arc& a = arcs_[id];
      if (a.capacity <= a.flow || level_[a.to] != level_[v] + 1) continue;
      if (const std::int32_t pushed = dfs(a.to, sink, std::min(limit, a.capacity - a.flow))) {
        a.flow += pushed;
        arcs_[id ^ 1].flow -= pushed;
        return pushed;
      }
    }
    return 0;
  }

  std::vector<Arc> arcs_;
  std::vector<std::vector<std::size_t>> head_;
  std::vector<int> level_;
  std::vector<std::size_t> next_;
};

}  // namespace percovor

#endif  // PERCOVOR_MAX_FLOW_HPP
