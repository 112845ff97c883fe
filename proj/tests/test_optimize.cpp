#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "proto/baselines.hpp"
#include "proto/classifier.hpp"
#include "proto/data.hpp"
#include "proto/gradients.hpp"
#include "proto/kmeans.hpp"
#include "proto/lbfgs.hpp"
#include "proto/train.hpp"

using namespace proto;

TEST_CASE("quasi_newton_maximize: 1-D quadratic") {
    const ObjectiveFn f = [](const Vec& x, Vec& g) {
        g[0] = -2.0 * (x[0] - 3.0);
        return -(x[0] - 3.0) * (x[0] - 3.0);
    };
    const OptimResult res = quasi_newton_maximize(f, {0.0}, OptimizerConfig{});
    CHECK(res.converged);
    CHECK(std::abs(res.x[0] - 3.0) <= 1e-8);
}

TEST_CASE("quasi_newton_maximize: negated Rosenbrock") {
    const ObjectiveFn f = [](const Vec& x, Vec& g) {
        const double a = x[1] - x[0] * x[0];
        g[0] = -(-400.0 * x[0] * a - 2.0 * (1.0 - x[0]));
        g[1] = -(200.0 * a);
        return -(100.0 * a * a + (1.0 - x[0]) * (1.0 - x[0]));
    };
    OptimizerConfig cfg;
    cfg.max_iterations = 200;
    cfg.gradient_tolerance = 1e-6;
    const OptimResult res = quasi_newton_maximize(f, {-1.2, 1.0}, cfg);
    CHECK(res.converged);
    CHECK(res.iterations <= 200);
    CHECK(std::abs(res.x[0] - 1.0) <= 1e-5);
    CHECK(std::abs(res.x[1] - 1.0) <= 1e-5);
}

TEST_CASE("quasi_newton_maximize: never returns below the start value") {
    // Nasty non-smooth-ish objective with a cliff; the optimizer must still
    // report a value >= f(x0).
    const ObjectiveFn f = [](const Vec& x, Vec& g) {
        g[0] = std::cos(40.0 * x[0]) * 40.0 - 2.0 * x[0];
        return std::sin(40.0 * x[0]) - x[0] * x[0];
    };
    Vec g0(1);
    const double start = f({0.3}, g0);
    const OptimResult res = quasi_newton_maximize(f, {0.3}, OptimizerConfig{});
    CHECK(res.value >= start - 1e-12);
}

TEST_CASE("quasi_newton_maximize rejects bad configs") {
    const ObjectiveFn f = [](const Vec& x, Vec& g) {
        g[0] = -x[0];
        return -0.5 * x[0] * x[0];
    };
    OptimizerConfig bad;
    bad.gradient_tolerance = 0.0;
    CHECK_THROWS(quasi_newton_maximize(f, {1.0}, bad));
    bad = OptimizerConfig{};
    bad.wolfe_c1 = 0.95;  // c1 >= c2
    CHECK_THROWS(quasi_newton_maximize(f, {1.0}, bad));
}

TEST_CASE("kmeans: exhaustive oracle on a 1-D set") {
    const std::vector<Vec> points{{0.0}, {1.0}, {9.0}, {10.0}};

    // oracle: enumerate all 2-partitions, keep the best WCSS
    double best_wcss = 1e300;
    Vec best_centers(2);
    for (int mask = 1; mask < 15; ++mask) {  // proper nonempty bipartitions
        double s0 = 0.0, s1 = 0.0;
        int c0 = 0, c1 = 0;
        for (int i = 0; i < 4; ++i)
            (mask >> i & 1 ? s1 : s0) += points[i][0], (mask >> i & 1 ? c1 : c0) += 1;
        if (c0 == 0 || c1 == 0) continue;
        const double m0 = s0 / c0, m1 = s1 / c1;
        double wcss = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double m = mask >> i & 1 ? m1 : m0;
            wcss += (points[i][0] - m) * (points[i][0] - m);
        }
        if (wcss < best_wcss) {
            best_wcss = wcss;
            best_centers = {std::min(m0, m1), std::max(m0, m1)};
        }
    }
    CHECK(best_centers[0] == 0.5);  // sanity of the oracle itself
    CHECK(best_centers[1] == 9.5);

    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        KmeansResult res = kmeans(points, 2, seed, 2);
        Vec got{res.centers[0][0], res.centers[1][0]};
        std::sort(got.begin(), got.end());
        CHECK(got[0] == doctest::Approx(best_centers[0]).epsilon(1e-12));
        CHECK(got[1] == doctest::Approx(best_centers[1]).epsilon(1e-12));
        CHECK(res.wcss == doctest::Approx(best_wcss).epsilon(1e-12));
    }
}

TEST_CASE("kmeans: K equal to distinct points and K = 1") {
    const std::vector<Vec> points{{0.0, 1.0}, {2.0, 0.0}, {5.0, 5.0}, {2.0, 0.0}};
    KmeansResult each = kmeans(points, 3, 1, 1);
    CHECK(each.wcss == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_FALSE(each.degenerate);

    KmeansResult one = kmeans(points, 1, 0, 1);
    CHECK(one.centers[0][0] == doctest::Approx((0.0 + 2.0 + 5.0 + 2.0) / 4).epsilon(1e-15));
    CHECK(one.centers[0][1] == doctest::Approx((1.0 + 0.0 + 5.0 + 0.0) / 4).epsilon(1e-15));
}

TEST_CASE("kmeans: fewer distinct points than K pads with a warning") {
    const std::vector<Vec> points{{1.0}, {1.0}, {4.0}, {4.0}};
    KmeansResult res = kmeans(points, 3, 0, 2);
    CHECK(res.degenerate);
    CHECK(res.centers.size() == 3);
    CHECK(res.centers[0] == Vec{1.0});
    CHECK(res.centers[1] == Vec{4.0});
    CHECK(res.centers[2] == Vec{1.0});  // padded by duplication

    CHECK_THROWS(kmeans({{1.0}}, 2, 0, 1));  // fewer points than K
}

TEST_CASE("kmeans: deterministic for a given seed") {
    Rng rng(50);
    std::vector<Vec> points(40, Vec(3));
    for (Vec& p : points)
        for (double& e : p) e = rng.normal();
    const KmeansResult a = kmeans(points, 5, 9, 3);
    const KmeansResult b = kmeans(points, 5, 9, 3);
    CHECK(a.centers == b.centers);
    CHECK(a.wcss == b.wcss);
}

TEST_CASE("optimize_theta_block: uniform labels and lambda > 0 give zero theta") {
    Rng rng(51);
    Dataset data = testutil::random_dataset(rng, 6, 3, 2, 3);
    for (Instance& inst : data.instances) inst.label.assign(3, 1.0 / 3);

    Model m = testutil::random_model(rng, 2, 2, 3, 0.5);
    OptimizerConfig oc;
    oc.gradient_tolerance = 1e-9;
    const Model out = optimize_theta_block(data, m, oc);
    for (const Vec& row : out.weights.theta)
        for (double t : row) CHECK(std::abs(t) <= 1e-6);
}

TEST_CASE("optimize_theta_block: restarts agree on the concave subproblem") {
    Rng rng(52);
    Dataset data = testutil::random_dataset(rng, 12, 4, 2, 2);
    Model base = testutil::random_model(rng, 3, 2, 2, 0.1);

    OptimizerConfig oc;
    oc.gradient_tolerance = 1e-9;
    oc.max_iterations = 500;
    Vec objectives;
    for (int restart = 0; restart < 3; ++restart) {
        Model m = base;
        for (Vec& row : m.weights.theta)
            for (double& t : row) t = 2.0 * rng.normal();
        const Model out = optimize_theta_block(data, m, oc);
        objectives.push_back(dataset_objective(data, out));
    }
    for (double v : objectives) CHECK(std::abs(v - objectives[0]) <= 1e-6);
}

TEST_CASE("optimize_theta_block: 2x2 grid verification on one instance") {
    Dataset data;
    data.dim = 1;
    data.classes = 2;
    Instance inst;
    inst.id = "a";
    inst.features = {{0.4}};
    inst.label = {0.8, 0.2};
    data.instances.push_back(inst);

    Model m;
    m.codebook.centers = {{0.0}, {1.0}};
    m.codebook.beta = 1.0;
    m.weights = zero_weights(2, 2, 0.1);

    OptimizerConfig oc;
    oc.gradient_tolerance = 1e-10;
    const Model out = optimize_theta_block(data, m, oc);
    const double best = dataset_objective(data, out);

    // coarse dense grid over the 4 theta entries
    double grid_best = -1e300;
    Model probe = m;
    for (double a = -2.0; a <= 2.01; a += 0.25)
        for (double b = -2.0; b <= 2.01; b += 0.25)
            for (double c = -2.0; c <= 2.01; c += 0.25)
                for (double d = -2.0; d <= 2.01; d += 0.25) {
                    probe.weights.theta = {{a, b}, {c, d}};
                    grid_best = std::max(grid_best, dataset_objective(data, probe));
                }
    CHECK(best >= grid_best - 1e-9);
}

TEST_CASE("optimize_codebook_block: zero theta leaves the codebook unchanged") {
    Rng rng(53);
    Dataset data = testutil::random_dataset(rng, 5, 3, 2, 2);
    Model m = testutil::random_model(rng, 3, 2, 2, 0.0);
    for (Vec& row : m.weights.theta) row.assign(row.size(), 0.0);

    const Model out = optimize_codebook_block(data, m, OptimizerConfig{});
    CHECK(out.codebook.centers == m.codebook.centers);
    CHECK(out.codebook.beta == m.codebook.beta);
}

TEST_CASE("optimize_codebook_block: K = 1 is flat and unchanged") {
    Rng rng(54);
    Dataset data = testutil::random_dataset(rng, 5, 3, 2, 2);
    Model m = testutil::random_model(rng, 1, 2, 2, 0.1);

    const Model out = optimize_codebook_block(data, m, OptimizerConfig{});
    CHECK(out.codebook.centers == m.codebook.centers);
    CHECK(out.codebook.beta == m.codebook.beta);
}

TEST_CASE("optimize_codebook_block improves the objective on toy data") {
    const Dataset data = generate_figure1_toy(figure1_config(0));
    TrainConfig tc;
    tc.k = 2;
    tc.lambda = 0.01;
    OptimizerConfig oc;

    // set up a model with fitted theta, then run the codebook block
    const KmeansResult km = kmeans_init(data, tc.k, tc.seed, tc.kmeans_restarts);
    Model m;
    m.codebook.centers = km.centers;
    m.codebook.beta = default_beta(data, km.centers);
    m.weights = zero_weights(data.classes, tc.k, tc.lambda);
    m = optimize_theta_block(data, m, oc);

    const double before = dataset_objective(data, m);
    const Model out = optimize_codebook_block(data, m, oc);
    CHECK(dataset_objective(data, out) > before);
}

TEST_CASE("coordinate_ascent_train: monotone trace, improvement, determinism") {
    const Dataset data = generate_figure1_toy(figure1_config(3));
    TrainConfig tc;
    tc.k = 2;
    tc.lambda = 0.01;
    tc.rounds = 6;
    tc.seed = 3;
    OptimizerConfig oc;

    const auto [model, report] = coordinate_ascent_train(data, tc, oc);
    REQUIRE(!report.objective_trace.empty());
    double prev = report.initial_objective;
    for (double v : report.objective_trace) {
        CHECK(v >= prev - 1e-9);
        prev = v;
    }
    CHECK(report.objective_trace.back() > report.initial_objective);

    const auto [model2, report2] = coordinate_ascent_train(data, tc, oc);
    CHECK(report.objective_trace == report2.objective_trace);
    CHECK(model.codebook.centers == model2.codebook.centers);
    CHECK(model.codebook.beta == model2.codebook.beta);
    CHECK(model.weights.theta == model2.weights.theta);

    // byte-for-byte after serialization
    const auto p1 = std::filesystem::temp_directory_path() / "proto_det_a.json";
    const auto p2 = std::filesystem::temp_directory_path() / "proto_det_b.json";
    save_model(model, p1);
    save_model(model2, p2);
    std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
    const std::string s1((std::istreambuf_iterator<char>(f1)), {});
    const std::string s2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(s1 == s2);
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
}

TEST_CASE("coordinate_ascent_train: frozen codebook reduces to the soft baseline") {
    const Dataset data = generate_figure1_toy(figure1_config(1));
    TrainConfig tc;
    tc.k = 3;
    tc.lambda = 0.05;
    tc.rounds = 1;
    tc.seed = 1;
    tc.freeze_codebook = true;
    OptimizerConfig oc;

    const auto [frozen, report] = coordinate_ascent_train(data, tc, oc);
    (void)report;
    const Model baseline = train_standard_prototype(data, tc, oc, /*soft_encoding=*/true);

    CHECK(frozen.codebook.centers == baseline.codebook.centers);  // shared k-means path
    CHECK(frozen.codebook.beta == baseline.codebook.beta);
    CHECK(frozen.weights.theta == baseline.weights.theta);
}

TEST_CASE("coordinate_ascent_train: early stop flags convergence") {
    const Dataset data = generate_figure1_toy(figure1_config(2));
    TrainConfig tc;
    tc.k = 2;
    tc.lambda = 0.05;
    tc.rounds = 50;
    tc.seed = 2;
    const auto [model, report] = coordinate_ascent_train(data, tc, OptimizerConfig{});
    (void)model;
    CHECK(report.converged);
    CHECK(report.rounds_completed < 50);
}

TEST_CASE("default_beta scales with squared dispersion") {
    Dataset data;
    data.dim = 1;
    data.classes = 2;
    for (int i = 0; i < 4; ++i) {
        Instance inst;
        inst.id = std::to_string(i);
        inst.features = {{static_cast<double>(i % 2 ? 3.0 : 1.0)}};
        inst.label = {1.0, 0.0};
        data.instances.push_back(inst);
    }
    // centers at 0: msd = (1 + 9 + 1 + 9)/4 = 5 -> beta = 0.1
    CHECK(default_beta(data, {{0.0}}) == doctest::Approx(0.1).epsilon(1e-12));
}
