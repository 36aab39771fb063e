#pragma once

// Exhaustive reference implementations used to cross-check the solvers.

#include "hmsort/association.hpp"
#include "hmsort/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

namespace hmsort::oracle {

struct BestMatching {
    std::size_t cardinality = 0;
    double cost = 0.0;
};

/// Summed cost of the given matches, added in row order.
inline double matched_cost(const CostMatrix& costs, const std::vector<Match>& matches) {
    std::vector<Match> sorted = matches;
    std::sort(sorted.begin(), sorted.end());
    double total = 0.0;
    for (const Match& m : sorted) total += costs(m.row, m.col);
    return total;
}

/// Tries every permutation of the padded square matrix. A permutation's
/// matching is the set of feasible real entries it hits; the best is the
/// largest such set, cheapest among equals.
inline BestMatching brute_force_assignment(const CostMatrix& costs) {
    const std::size_t n = std::max(costs.rows(), costs.cols());
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    BestMatching best;
    bool first = true;
    do {
        std::vector<Match> ms;
        for (std::size_t r = 0; r < costs.rows(); ++r) {
            const std::size_t c = perm[r];
            if (c < costs.cols() && costs.feasible(r, c)) ms.push_back({r, c});
        }
        const double cost = matched_cost(costs, ms);
        if (first || ms.size() > best.cardinality || (ms.size() == best.cardinality && cost < best.cost)) {
            best = {ms.size(), cost};
            first = false;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

/// IDTP of the best identity mapping, found by enumerating every partial
/// injection from gt ids to predicted ids.
inline std::size_t exhaustive_idtp(const std::vector<FrameOutput>& gt, const std::vector<FrameOutput>& pred,
                                   double threshold = 0.5) {
    std::vector<int> gids, pids;
    std::map<std::pair<int, int>, std::size_t> overlap;
    std::map<int, const FrameOutput*> pred_by_frame;
    for (const auto& f : pred) {
        pred_by_frame[f.frame] = &f;
        for (const auto& e : f.entries) pids.push_back(e.id);
    }
    for (const auto& f : gt) {
        for (const auto& g : f.entries) {
            gids.push_back(g.id);
            const auto it = pred_by_frame.find(f.frame);
            if (it == pred_by_frame.end()) continue;
            for (const auto& p : it->second->entries) {
                if (iou(g.box, p.box) >= threshold) ++overlap[{g.id, p.id}];
            }
        }
    }
    auto uniq = [](std::vector<int>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    uniq(gids);
    uniq(pids);

    std::size_t best = 0;
    std::vector<bool> used(pids.size(), false);
    auto recurse = [&](auto&& self, std::size_t gi, std::size_t acc) -> void {
        if (gi == gids.size()) {
            best = std::max(best, acc);
            return;
        }
        self(self, gi + 1, acc);  // leave this gt id unmapped
        for (std::size_t pi = 0; pi < pids.size(); ++pi) {
            if (used[pi]) continue;
            used[pi] = true;
            const auto it = overlap.find({gids[gi], pids[pi]});
            self(self, gi + 1, acc + (it == overlap.end() ? 0 : it->second));
            used[pi] = false;
        }
    };
    recurse(recurse, 0, 0);
    return best;
}

}  // namespace hmsort::oracle
