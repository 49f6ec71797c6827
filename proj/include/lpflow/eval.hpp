#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lpflow/common.hpp"
#include "lpflow/rng.hpp"

namespace lpflow {

// Sliced squared 2-Wasserstein distance: the average over random unit
// projections of the 1-D squared Wasserstein distance between the projected
// empirical distributions. Symmetric under the same projection stream; zero
// on identical multisets.
double sliced_w2(const SampleSet& a, const SampleSet& b, int projections, Rng& rng);

// Unbiased MMD^2 estimator with RBF kernel exp(-|u-v|^2 / (2 bandwidth^2)).
// May be slightly negative around zero because the diagonal terms are removed.
double mmd_rbf(const SampleSet& a, const SampleSet& b, double bandwidth);

// Median pairwise Euclidean distance over the pooled sets (subsampled to at
// most 2048 points); the documented default bandwidth.
double median_heuristic_bandwidth(const SampleSet& a, const SampleSet& b);

struct SweepRow {
    std::string method;    // metric name
    std::string prior;     // gaussian | learned
    std::string solver;
    int steps = 0;
    double metric = 0.0;
    double seconds_per_batch = 0.0;
};

// Evaluates generator(steps) against the reference for each entry of
// steps_list, recording the metric and the generator wall time.
std::vector<SweepRow> step_sweep(const std::function<SampleSet(int)>& generator,
                                 const SampleSet& reference,
                                 std::span<const int> steps_list,
                                 const std::function<double(const SampleSet&, const SampleSet&)>& metric);

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

// gnuplot script plotting metric vs steps from the sweep CSV
void write_sweep_plot_script(const std::filesystem::path& path, const std::string& csv_name);

}  // namespace lpflow
