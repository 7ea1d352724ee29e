#ifndef PCT_TESTS_SUPPORT_R_ORACLE_H_
#define PCT_TESTS_SUPPORT_R_ORACLE_H_

#include <algorithm>
#include <random>
#include <utility>
#include <vector>

#include "pct/metrics/metrics.h"

namespace pct::testing {

// Random infection forest over `n` agents with final compartments. Agents
// outside the forest stay Susceptible; infected agents are Recovered with
// probability `recovered_prob`, else Exposed or Infectious.
inline std::pair<InfectionTree, std::vector<Compartment>> RandomForest(std::mt19937_64& rng,
                                                                       int n, int num_roots,
                                                                       int num_edges,
                                                                       double recovered_prob) {
  std::vector<AgentId> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  InfectionTree tree;
  std::vector<Day> day_infected(n, -1);
  std::vector<AgentId> infected;
  for (int i = 0; i < num_roots && i < n; ++i) {
    tree.roots.push_back(order[i]);
    infected.push_back(order[i]);
    day_infected[order[i]] = 0;
  }
  for (int i = num_roots; i < num_roots + num_edges && i < n; ++i) {
    const AgentId parent = infected[rng() % infected.size()];
    const AgentId child = order[i];
    const Day day = day_infected[parent] + 1 + static_cast<Day>(rng() % 5);
    tree.edges.push_back({parent, child, day});
    day_infected[child] = day;
    infected.push_back(child);
  }
  std::vector<Compartment> comps(n, Compartment::kSusceptible);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (AgentId a : infected) {
    if (u(rng) < recovered_prob) {
      comps[a] = Compartment::kRecovered;
    } else {
      comps[a] = (rng() % 2) ? Compartment::kExposed : Compartment::kInfectious;
    }
  }
  return {tree, comps};
}

// Independent recount: walk the forest from its roots breadth-first and,
// for each reached agent that has recovered, count its direct children.
// Returns {parents, children}; parents == 0 means R is undefined.
inline std::pair<int, int> BruteForceR(const InfectionTree& tree,
                                       const std::vector<Compartment>& comps) {
  std::vector<std::vector<AgentId>> kids(comps.size());
  std::vector<char> has_parent(comps.size(), 0);
  for (const InfectionEdge& e : tree.edges) {
    kids[e.infector].push_back(e.infectee);
    has_parent[e.infectee] = 1;
  }
  std::vector<AgentId> queue(tree.roots.begin(), tree.roots.end());
  int parents = 0, children = 0;
  for (size_t head = 0; head < queue.size(); ++head) {
    const AgentId a = queue[head];
    if (comps[a] == Compartment::kRecovered) {
      ++parents;
      children += static_cast<int>(kids[a].size());
    }
    for (AgentId c : kids[a]) queue.push_back(c);
  }
  return {parents, children};
}

}  // namespace pct::testing

#endif  // PCT_TESTS_SUPPORT_R_ORACLE_H_
