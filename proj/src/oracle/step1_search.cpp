#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>

#include "coplan/oracle.hpp"

namespace coplan::oracle {

namespace {

// Choices of one flight at one resource, as a bit string over its window.
struct Pair {
  std::size_t flight = 0;
  ResourceId resource = 0;
  Timestep first = 0;
  int width = 0;
  std::vector<std::uint32_t> strings;  // candidate bit strings, most bits first
  std::uint32_t possible = 0;          // union of candidates
  int max_bits = 0;
};

class Search {
 public:
  Search(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
         std::span<const FlightRequest> requests, std::int64_t guard)
      : grid_(grid), occupancy_(occupancy), horizon_(horizon), requests_(requests), guard_(guard) {
    build_pairs();
    assigned_.assign(pairs_.size(), 0);
    pair_of_.assign(requests_.size(), std::vector<int>(grid_.size(), -1));
    for (std::size_t i = 0; i < pairs_.size(); ++i) pair_of_[pairs_[i].flight][pairs_[i].resource] = static_cast<int>(i);
  }

  Step1Optimum run() {
    dfs(0, 0);
    Step1Optimum out;
    out.total_choices = best_;
    out.nodes = nodes_;
    out.choice_sets = best_sets_.empty() ? to_sets() : best_sets_;
    if (best_ < 0) throw InvariantViolation("step 1 oracle found no feasible assignment");
    return out;
  }

 private:
  void build_pairs() {
    std::vector<ResourceId> order(grid_.vertiport_adjacent().begin(), grid_.vertiport_adjacent().end());
    order.insert(order.end(), grid_.vertiports().begin(), grid_.vertiports().end());
    for (ResourceId r : order) {
      for (std::size_t f = 0; f < requests_.size(); ++f) {
        const auto& req = requests_[f];
        if (!in_choice_domain(grid_, req, r)) continue;
        Pair p;
        p.flight = f;
        p.resource = r;
        p.first = std::max(req.departure, horizon_.start);
        p.width = std::max(0, std::min(req.window_end() - 1, horizon_.last()) - p.first + 1);
        if (p.width > 20) throw GuardExceeded("step 1 oracle window too wide");
        std::uint32_t usable = 0;
        for (int i = 0; i < p.width; ++i) {
          const Timestep t = p.first + i;
          if (r == req.origin && t > req.departure + req.flexibility) continue;
          if (r == req.destination && t < req.arrival) continue;
          if (remaining_capacity(grid_, occupancy_, r, t) < 1) continue;
          usable |= 1u << i;
        }
        for (std::uint32_t s = 0; s < (1u << p.width); ++s) {
          if (s & ~usable) continue;
          auto held = [&](Timestep t) { return t >= p.first && t < p.first + p.width && ((s >> (t - p.first)) & 1u); };
          if (!grid_.is_vertiport(r) && !dwell_satisfied(held, req.min_dwell(r), p.first, p.first + p.width - 1)) {
            continue;
          }
          p.strings.push_back(s);
          p.possible |= s;
          p.max_bits = std::max(p.max_bits, std::popcount(s));
        }
        std::stable_sort(p.strings.begin(), p.strings.end(),
                         [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) > std::popcount(b); });
        pairs_.push_back(std::move(p));
      }
    }
  }

  bool offers(std::size_t f, ResourceId r, Timestep t, std::size_t depth) const {
    const int i = pair_of_[f][r];
    if (i < 0) return false;
    const auto& p = pairs_[i];
    if (t < p.first || t >= p.first + p.width) return false;
    const auto bit = 1u << (t - p.first);
    if (static_cast<std::size_t>(i) > depth) return (p.possible & bit) != 0;  // optimistic
    return (assigned_[i] & bit) != 0;
  }

  // Departure/arrival slots need an adjacent choice next/previous step.
  bool endpoints_plausible(std::size_t depth) const {
    const auto& p = pairs_[depth];
    const auto& req = requests_[p.flight];
    if (p.resource != req.origin && p.resource != req.destination) return true;
    const int step = p.resource == req.origin ? 1 : -1;
    for (int i = 0; i < p.width; ++i) {
      if (!((assigned_[depth] >> i) & 1u)) continue;
      bool ok = false;
      for (ResourceId n : grid_.neighbors(p.resource)) ok = ok || offers(p.flight, n, p.first + i + step, depth);
      if (!ok) return false;
    }
    return true;
  }

  int upper_bound(std::size_t depth) const {
    int bound = 0;
    std::size_t i = depth;
    while (i < pairs_.size()) {
      const ResourceId r = pairs_[i].resource;
      int by_strings = 0;
      std::map<Timestep, int> wanting;
      for (; i < pairs_.size() && pairs_[i].resource == r; ++i) {
        by_strings += pairs_[i].max_bits;
        for (int b = 0; b < pairs_[i].width; ++b) {
          if ((pairs_[i].possible >> b) & 1u) ++wanting[pairs_[i].first + b];
        }
      }
      int by_capacity = 0;
      for (const auto& [t, n] : wanting) {
        by_capacity += std::min(n, std::max(0, remaining_capacity(grid_, occupancy_, r, t) - used({r, t})));
      }
      bound += std::min(by_strings, by_capacity);
    }
    return bound;
  }

  int used(ResourceTime rt) const {
    auto it = load_.find(rt);
    return it == load_.end() ? 0 : it->second;
  }

  bool place(std::size_t depth, std::uint32_t s, int delta) {
    const auto& p = pairs_[depth];
    bool ok = true;
    for (int i = 0; i < p.width; ++i) {
      if (!((s >> i) & 1u)) continue;
      const ResourceTime rt{p.resource, p.first + i};
      load_[rt] += delta;
      if (load_[rt] > remaining_capacity(grid_, occupancy_, rt.resource, rt.t)) ok = false;
    }
    return ok;
  }

  std::vector<ChoiceSet> to_sets() const {
    std::vector<ChoiceSet> sets;
    for (const auto& req : requests_) sets.push_back({req.id, req.origin, req.destination, {}});
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
      for (int b = 0; b < pairs_[i].width; ++b) {
        if ((assigned_[i] >> b) & 1u) sets[pairs_[i].flight].choices.insert({pairs_[i].resource, pairs_[i].first + b});
      }
    }
    return sets;
  }

  void dfs(std::size_t depth, int count) {
    if (++nodes_ > guard_) throw GuardExceeded("step 1 oracle search");
    if (count + upper_bound(depth) <= best_) return;
    if (depth == pairs_.size()) {
      const auto sets = to_sets();
      if (check_choice_sets(grid_, occupancy_, horizon_, requests_, sets).empty()) {
        best_ = count;
        best_sets_ = sets;
      }
      return;
    }
    for (std::uint32_t s : pairs_[depth].strings) {
      assigned_[depth] = s;
      if (place(depth, s, 1) && endpoints_plausible(depth)) dfs(depth + 1, count + std::popcount(s));
      place(depth, s, -1);
    }
    assigned_[depth] = 0;
  }

  const AirspaceGrid& grid_;
  const Occupancy& occupancy_;
  const Horizon& horizon_;
  std::span<const FlightRequest> requests_;
  std::int64_t guard_;
  std::vector<Pair> pairs_;
  std::vector<std::vector<int>> pair_of_;
  std::vector<std::uint32_t> assigned_;
  std::map<ResourceTime, int> load_;
  std::int64_t nodes_ = 0;
  int best_ = -1;
  std::vector<ChoiceSet> best_sets_;
};

}  // namespace

Step1Optimum step1_optimum(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                           std::span<const FlightRequest> requests, std::int64_t guard) {
  return Search(grid, occupancy, horizon, requests, guard).run();
}

}  // namespace coplan::oracle
