#include "zerops/birch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace zerops {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

}  // namespace

std::vector<double> MicroCluster::centroid() const {
    std::vector<double> c(ls.size());
    for (size_t i = 0; i < ls.size(); ++i) c[i] = ls[i] / n;
    return c;
}

double MicroCluster::radius2() const {
    double norm2 = 0.0;
    for (double v : ls) norm2 += (v / n) * (v / n);
    const double r2 = ss / n - norm2;
    return r2 > 0.0 ? r2 : 0.0;
}

void MicroCluster::add_point(std::span<const double> z) {
    n += 1.0;
    double sq = 0.0;
    for (size_t i = 0; i < z.size(); ++i) {
        ls[i] += z[i];
        sq += z[i] * z[i];
    }
    ss += sq;
}

void MicroCluster::merge(const MicroCluster& other) {
    n += other.n;
    for (size_t i = 0; i < ls.size(); ++i) ls[i] += other.ls[i];
    ss += other.ss;
}

void MicroCluster::scale(double factor) {
    n *= factor;
    for (double& v : ls) v *= factor;
    ss *= factor;
}

BirchResult birch_insert(BirchState& state, std::span<const double> z) {
    auto& clusters = state.clusters;
    const auto& p = state.params;

    if (p.decay > 0.0) {
        const double keep = 1.0 - p.decay;
        for (auto& c : clusters) c.scale(keep);
        std::erase_if(clusters, [&](const MicroCluster& c) { return c.n < p.prune_floor; });
    }

    if (clusters.empty()) {
        MicroCluster fresh{0.0, std::vector<double>(z.size(), 0.0), 0.0};
        fresh.add_point(z);
        clusters.push_back(std::move(fresh));
        return {std::vector<double>(z.begin(), z.end()), 0.0};
    }

    size_t nearest = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    std::vector<double> best_centroid;
    for (size_t i = 0; i < clusters.size(); ++i) {
        auto c = clusters[i].centroid();
        const double d2 = squared_distance(z, c);
        if (d2 < best_d2) {
            best_d2 = d2;
            nearest = i;
            best_centroid = std::move(c);
        }
    }
    const double dist = std::sqrt(best_d2);

    if (dist <= p.distance_threshold) {
        clusters[nearest].add_point(z);
    } else {
        MicroCluster fresh{0.0, std::vector<double>(z.size(), 0.0), 0.0};
        fresh.add_point(z);
        clusters.push_back(std::move(fresh));
    }

    if (clusters.size() > p.max_clusters) {
        // Merge the two clusters with the closest centroids.
        size_t a = 0, b = 1;
        double best = std::numeric_limits<double>::infinity();
        std::vector<std::vector<double>> centroids(clusters.size());
        for (size_t i = 0; i < clusters.size(); ++i) centroids[i] = clusters[i].centroid();
        for (size_t i = 0; i + 1 < clusters.size(); ++i) {
            for (size_t j = i + 1; j < clusters.size(); ++j) {
                const double d2 = squared_distance(centroids[i], centroids[j]);
                if (d2 < best) {
                    best = d2;
                    a = i;
                    b = j;
                }
            }
        }
        clusters[a].merge(clusters[b]);
        clusters.erase(clusters.begin() + static_cast<ptrdiff_t>(b));
    }

    return {std::move(best_centroid), dist};
}

}  // namespace zerops
