#include "lpflow/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace lpflow {

namespace {

// 1-D squared Wasserstein between sorted empirical distributions with
// uniform weights 1/n and 1/m (quantile coupling).
double w2_1d_sorted(const std::vector<double>& a, const std::vector<double>& b) {
    const size_t n = a.size();
    const size_t m = b.size();
    double acc = 0.0;
    double cur = 0.0;
    size_t i = 0;
    size_t j = 0;
    while (i < n && j < m) {
        const double ra = static_cast<double>(i + 1) / n;
        const double rb = static_cast<double>(j + 1) / m;
        const double nxt = std::min(ra, rb);
        const double diff = a[i] - b[j];
        acc += (nxt - cur) * diff * diff;
        cur = nxt;
        if (ra <= nxt) ++i;
        if (rb <= nxt) ++j;
    }
    return acc;
}

}  // namespace

double sliced_w2(const SampleSet& a, const SampleSet& b, int projections, Rng& rng) {
    require(a.count >= 1 && b.count >= 1, "sliced_w2: sets must be non-empty");
    require(a.dim == b.dim, "sliced_w2: dimension mismatch");
    require(projections >= 1, "sliced_w2: projections must be >= 1");
    const int d = a.dim;

    std::vector<double> u(d);
    std::vector<double> pa(a.count), pb(b.count);
    double acc = 0.0;
    for (int p = 0; p < projections; ++p) {
        double norm = 0.0;
        do {
            rng.fill_gaussian<double>(std::span<double>(u));
            norm = 0.0;
            for (double x : u) norm += x * x;
        } while (norm == 0.0);
        norm = std::sqrt(norm);
        for (auto& x : u) x /= norm;

        for (int i = 0; i < a.count; ++i) {
            const auto r = a.row(i);
            double s = 0.0;
            for (int j = 0; j < d; ++j) s += r[j] * u[j];
            pa[i] = s;
        }
        for (int i = 0; i < b.count; ++i) {
            const auto r = b.row(i);
            double s = 0.0;
            for (int j = 0; j < d; ++j) s += r[j] * u[j];
            pb[i] = s;
        }
        std::sort(pa.begin(), pa.end());
        std::sort(pb.begin(), pb.end());
        acc += w2_1d_sorted(pa, pb);
    }
    return acc / projections;
}

double mmd_rbf(const SampleSet& a, const SampleSet& b, double bandwidth) {
    require(a.count >= 2 && b.count >= 2, "mmd_rbf: each set needs at least 2 points");
    require(a.dim == b.dim, "mmd_rbf: dimension mismatch");
    require(bandwidth > 0.0, "mmd_rbf: bandwidth must be > 0");
    const double inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth);
    const int d = a.dim;

    auto sqdist = [d](std::span<const double> u, std::span<const double> v) {
        double s = 0.0;
        for (int j = 0; j < d; ++j) {
            const double e = u[j] - v[j];
            s += e * e;
        }
        return s;
    };

    const int m = a.count;
    const int n = b.count;
    double kaa = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            kaa += std::exp(-sqdist(a.row(i), a.row(j)) * inv2h2);
        }
    }
    double kbb = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            kbb += std::exp(-sqdist(b.row(i), b.row(j)) * inv2h2);
        }
    }
    double kab = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            kab += std::exp(-sqdist(a.row(i), b.row(j)) * inv2h2);
        }
    }
    return 2.0 * kaa / (static_cast<double>(m) * (m - 1)) +
           2.0 * kbb / (static_cast<double>(n) * (n - 1)) -
           2.0 * kab / (static_cast<double>(m) * n);
}

double median_heuristic_bandwidth(const SampleSet& a, const SampleSet& b) {
    require(a.dim == b.dim, "median_heuristic_bandwidth: dimension mismatch");
    const int total = a.count + b.count;
    require(total >= 2, "median_heuristic_bandwidth: need at least 2 points");
    constexpr int kCap = 2048;
    const int take = std::min(total, kCap);

    auto pooled_row = [&](int i) {
        return i < a.count ? a.row(i) : b.row(i - a.count);
    };
    std::vector<int> pick(take);
    for (int i = 0; i < take; ++i) {
        pick[i] = static_cast<int>((i + 0.5) * total / take);
    }
    const int d = a.dim;
    std::vector<double> dists;
    dists.reserve(static_cast<size_t>(take) * (take - 1) / 2);
    for (int i = 0; i < take; ++i) {
        const auto u = pooled_row(pick[i]);
        for (int j = i + 1; j < take; ++j) {
            const auto v = pooled_row(pick[j]);
            double s = 0.0;
            for (int c = 0; c < d; ++c) {
                const double e = u[c] - v[c];
                s += e * e;
            }
            dists.push_back(std::sqrt(s));
        }
    }
    if (dists.empty()) return 1.0;
    const size_t mid = dists.size() / 2;
    std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
    const double med = dists[mid];
    return med > 0.0 ? med : 1.0;
}

std::vector<SweepRow> step_sweep(const std::function<SampleSet(int)>& generator,
                                 const SampleSet& reference,
                                 std::span<const int> steps_list,
                                 const std::function<double(const SampleSet&, const SampleSet&)>& metric) {
    require(!steps_list.empty(), "step_sweep: steps_list must be non-empty");
    std::vector<SweepRow> rows;
    rows.reserve(steps_list.size());
    for (int steps : steps_list) {
        require(steps >= 1, "step_sweep: step counts must be >= 1");
        SweepRow row;
        row.steps = steps;
        const auto t0 = std::chrono::steady_clock::now();
        const SampleSet batch = generator(steps);
        const auto t1 = std::chrono::steady_clock::now();
        row.seconds_per_batch = std::chrono::duration<double>(t1 - t0).count();
        row.metric = metric(batch, reference);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    os << "method,prior,solver,steps,metric,seconds_per_batch\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), ",%d,%.17g,%.6g\n", r.steps, r.metric, r.seconds_per_batch);
        os << r.method << ',' << r.prior << ',' << r.solver << buf;
    }
}

void write_sweep_plot_script(const std::filesystem::path& path, const std::string& csv_name) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    os << "# gnuplot script: metric vs solver steps per (prior, solver) series\n"
          "set datafile separator ','\n"
          "set key autotitle columnhead outside\n"
          "set logscale x 2\n"
          "set xlabel 'solver steps'\n"
          "set ylabel 'metric'\n"
          "set grid\n"
          "plot for [p in 'gaussian learned'] for [s in 'euler midpoint heun3'] \\\n"
          "    '" << csv_name << "' using (strcol(2) eq p && strcol(3) eq s ? $4 : NaN):5 \\\n"
          "    with linespoints title p.'-'.s\n";
}

}  // namespace lpflow
