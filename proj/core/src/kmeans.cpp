#include "tessera/geo/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "tessera/errors.hpp"
#include "tessera/rng.hpp"

namespace tessera::geo {

namespace {

double sq_dist(const ProjectedPoint& a, const ProjectedPoint& b) {
    const double dx = a.x_km - b.x_km;
    const double dy = a.y_km - b.y_km;
    return dx * dx + dy * dy;
}

std::size_t count_distinct(const std::vector<ProjectedPoint>& points) {
    std::set<std::pair<double, double>> seen;
    for (const auto& p : points) seen.insert({p.x_km, p.y_km});
    return seen.size();
}

/// k-means++: first site uniform, then each next site sampled with
/// probability proportional to the squared distance to the nearest chosen
/// site.
std::vector<ProjectedPoint> seed_plus_plus(const std::vector<ProjectedPoint>& points, int k,
                                           Rng& rng) {
    const std::size_t n = points.size();
    std::vector<ProjectedPoint> centroids;
    centroids.reserve(k);
    centroids.push_back(points[rng.uniform_index(n)]);

    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(points[i], centroids[0]);

    while (static_cast<int>(centroids.size()) < k) {
        double total = 0.0;
        for (double d : d2) total += d;
        std::size_t pick = 0;
        if (total <= 0.0) {
            // remaining points coincide with chosen sites; pick any new one
            pick = rng.uniform_index(n);
        } else {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= target) {
                    pick = i;
                    break;
                }
                pick = i;
            }
        }
        centroids.push_back(points[pick]);
        for (std::size_t i = 0; i < n; ++i)
            d2[i] = std::min(d2[i], sq_dist(points[i], centroids.back()));
    }
    return centroids;
}

}  // namespace

int assign_nearest(const ProjectedPoint& p, const std::vector<ProjectedPoint>& centroids) {
    if (centroids.empty()) throw InvalidArgument("assign_nearest: empty centroid list");
    int best = 0;
    double best_d = sq_dist(p, centroids[0]);
    for (std::size_t i = 1; i < centroids.size(); ++i) {
        const double d = sq_dist(p, centroids[i]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

KMeansResult kmeans_cluster(const std::vector<ProjectedPoint>& points, int k, std::uint64_t seed,
                            int max_iterations) {
    if (points.empty()) throw InvalidArgument("kmeans: empty input");
    if (k < 1) throw InvalidArgument("kmeans: k must be positive");
    if (static_cast<std::size_t>(k) > count_distinct(points))
        throw InvalidArgument("kmeans: k exceeds the number of distinct points");

    const std::size_t n = points.size();
    Rng rng(mix_seed(seed));

    KMeansResult result;
    result.centroids = seed_plus_plus(points, k, rng);
    result.assignments.assign(n, -1);

    for (int iter = 0; iter < max_iterations; ++iter) {
        // assignment step
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            const int a = assign_nearest(points[i], result.centroids);
            if (a != result.assignments[i]) {
                result.assignments[i] = a;
                changed = true;
            }
        }

        // update step
        std::vector<double> sx(k, 0.0), sy(k, 0.0);
        std::vector<int> count(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const int a = result.assignments[i];
            sx[a] += points[i].x_km;
            sy[a] += points[i].y_km;
            ++count[a];
        }
        for (int c = 0; c < k; ++c) {
            if (count[c] > 0) {
                result.centroids[c] = {sx[c] / count[c], sy[c] / count[c]};
            } else {
                // empty cluster: move it onto the point farthest from its centroid
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (count[result.assignments[i]] <= 1) continue;  // don't empty another
                    const double d = sq_dist(points[i], result.centroids[result.assignments[i]]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                --count[result.assignments[far]];
                result.centroids[c] = points[far];
                result.assignments[far] = c;
                count[c] = 1;
                changed = true;
            }
        }

        double j = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            j += sq_dist(points[i], result.centroids[result.assignments[i]]);
        result.inertia_history.push_back(j);
        result.iterations = iter + 1;

        if (!changed) break;
    }

    // final assignments against the final centroids, so that every point is
    // provably nearest to its centroid
    for (std::size_t i = 0; i < n; ++i)
        result.assignments[i] = assign_nearest(points[i], result.centroids);
    double j = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        j += sq_dist(points[i], result.centroids[result.assignments[i]]);
    result.inertia = j;
    return result;
}

}  // namespace tessera::geo
