#pragma once

// BIRCH-style identity function: a flat list of micro-clusters, each a CF
// triple (n, linear sum, squared sum), with per-insert exponential decay for
// concept adaptation. Insertion joins the nearest cluster within the distance
// threshold or opens a new one; when the cluster budget is exceeded the two
// closest clusters merge. The reconstruction of a point is the nearest
// centroid as it stood before the insert.

#include <cstdint>
#include <span>
#include <vector>

namespace zerops {

struct MicroCluster {
    double n = 0.0;           // weighted point count
    std::vector<double> ls;   // linear sum
    double ss = 0.0;          // squared sum (scalar)

    std::vector<double> centroid() const;
    // ss/n - |ls/n|^2, clamped at 0 against rounding.
    double radius2() const;

    void add_point(std::span<const double> z);
    void merge(const MicroCluster& other);
    void scale(double factor);
};

struct BirchParams {
    double distance_threshold = 3.0;  // T, in standardized units
    size_t max_clusters = 50;         // M
    double decay = 0.001;             // lambda per insert; 0 disables aging
    double prune_floor = 0.01;        // clusters with n below this are dropped
};

struct BirchState {
    BirchParams params;
    std::vector<MicroCluster> clusters;
};

struct BirchResult {
    std::vector<double> reconstruction;
    double error = 0.0;
};

// Total function: never fails. On an empty state the point reconstructs as
// itself with error 0 and seeds the first cluster.
BirchResult birch_insert(BirchState& state, std::span<const double> z);

}  // namespace zerops
