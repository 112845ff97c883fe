#include "proto/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "proto/encoder.hpp"
#include "proto/rng.hpp"

namespace proto {

namespace {

int nearest_center(const Vec& x, const std::vector<Vec>& centers) {
    int best = 0;
    double best_d = squared_distance(centers[0], x);
    for (std::size_t c = 1; c < centers.size(); ++c) {
        const double d = squared_distance(centers[c], x);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

double wcss_of(const std::vector<Vec>& points, const std::vector<Vec>& centers,
               const std::vector<int>& assign) {
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        s += squared_distance(centers[assign[i]], points[i]);
    return s;
}

std::vector<Vec> distinct_in_order(const std::vector<Vec>& points) {
    std::vector<std::size_t> order(points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a] != points[b]) return points[a] < points[b];
        return a < b;  // keep first occurrence
    });
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i == 0 || points[order[i]] != points[order[i - 1]]) keep.push_back(order[i]);
    }
    std::sort(keep.begin(), keep.end());  // first-occurrence order
    std::vector<Vec> out;
    out.reserve(keep.size());
    for (std::size_t i : keep) out.push_back(points[i]);
    return out;
}

struct Run {
    std::vector<Vec> centers;
    double wcss;
};

Run lloyd_run(const std::vector<Vec>& points, int k, std::uint64_t seed, Execution exec) {
    const std::size_t p = points.size();
    const int d = static_cast<int>(points.front().size());
    Rng rng(seed);

    // Greedy farthest-point seeding from a random start.
    std::vector<Vec> centers;
    centers.reserve(k);
    centers.push_back(points[rng.uniform_int(0, static_cast<std::int64_t>(p) - 1)]);
    std::vector<double> min_d(p, std::numeric_limits<double>::infinity());
    while (static_cast<int>(centers.size()) < k) {
        const Vec& last = centers.back();
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < p; ++i) {
            min_d[i] = std::min(min_d[i], squared_distance(last, points[i]));
            if (min_d[i] > far_d) {
                far_d = min_d[i];
                far = i;
            }
        }
        centers.push_back(points[far]);
    }

    std::vector<int> assign(p, -1);
    std::vector<int> prev(p, -1);
    const int max_iter = 100;
    for (int iter = 0; iter < max_iter; ++iter) {
        parallel_for(p, exec, [&](std::size_t i) { assign[i] = nearest_center(points[i], centers); });

        std::vector<Vec> sums(k, Vec(d, 0.0));
        std::vector<std::int64_t> counts(k, 0);
        for (std::size_t i = 0; i < p; ++i) {  // fixed point order
            Vec& s = sums[assign[i]];
            for (int j = 0; j < d; ++j) s[j] += points[i][j];
            ++counts[assign[i]];
        }

        bool reseeded = false;
        std::vector<bool> taken(p, false);
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                for (int j = 0; j < d; ++j)
                    centers[c][j] = sums[c][j] / static_cast<double>(counts[c]);
            } else {
                // Move the empty cluster onto the point farthest from its center.
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < p; ++i) {
                    if (taken[i]) continue;
                    const double dist = squared_distance(centers[assign[i]], points[i]);
                    if (dist > far_d) {
                        far_d = dist;
                        far = i;
                    }
                }
                centers[c] = points[far];
                taken[far] = true;
                reseeded = true;
            }
        }

        if (!reseeded && assign == prev) break;
        prev = assign;
    }

    parallel_for(p, exec, [&](std::size_t i) { assign[i] = nearest_center(points[i], centers); });
    const double wcss = wcss_of(points, centers, assign);
    return Run{std::move(centers), wcss};
}

}  // namespace

std::vector<Vec> pooled_features(const Dataset& data) {
    std::vector<Vec> out;
    for (const Instance& inst : data.instances)
        out.insert(out.end(), inst.features.begin(), inst.features.end());
    return out;
}

KmeansResult kmeans(const std::vector<Vec>& points, int k, std::uint64_t seed, int restarts,
                    Execution exec) {
    if (k < 1) throw std::invalid_argument("K must be >= 1");
    if (static_cast<int>(points.size()) < k)
        throw std::invalid_argument("fewer points than K");
    if (restarts < 1) restarts = 1;

    const std::vector<Vec> distinct = distinct_in_order(points);
    if (static_cast<int>(distinct.size()) < k) {
        KmeansResult res;
        res.degenerate = true;
        res.centers = distinct;
        for (std::size_t i = 0; static_cast<int>(res.centers.size()) < k; ++i)
            res.centers.push_back(distinct[i % distinct.size()]);
        std::vector<int> assign(points.size());
        for (std::size_t i = 0; i < points.size(); ++i)
            assign[i] = nearest_center(points[i], res.centers);
        res.wcss = wcss_of(points, res.centers, assign);
        return res;
    }

    KmeansResult best;
    for (int r = 0; r < restarts; ++r) {
        Run run = lloyd_run(points, k, seed + static_cast<std::uint64_t>(r), exec);
        if (r == 0 || run.wcss < best.wcss) {
            best.centers = std::move(run.centers);
            best.wcss = run.wcss;
        }
    }
    return best;
}

KmeansResult kmeans_init(const Dataset& data, int k, std::uint64_t seed, int restarts,
                         Execution exec) {
    return kmeans(pooled_features(data), k, seed, restarts, exec);
}

}  // namespace proto
