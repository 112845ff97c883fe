// Timing harness for the dataset-level kernels: serial reference loops vs the
// blocked kernels in serial and parallel execution. Checks agreement while it
// is at it, so a bad kernel cannot post a good time.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "proto/classifier.hpp"
#include "proto/data.hpp"
#include "proto/gradients.hpp"
#include "proto/kmeans.hpp"
#include "proto/reference.hpp"
#include "proto/rng.hpp"

using namespace proto;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
    fn();  // warm-up
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

double max_abs_diff(const GradientBundle& a, const GradientBundle& b) {
    double m = std::abs(a.d_beta - b.d_beta);
    for (std::size_t l = 0; l < a.d_centers.size(); ++l)
        for (std::size_t j = 0; j < a.d_centers[l].size(); ++j)
            m = std::max(m, std::abs(a.d_centers[l][j] - b.d_centers[l][j]));
    for (std::size_t i = 0; i < a.d_theta.size(); ++i)
        for (std::size_t j = 0; j < a.d_theta[i].size(); ++j)
            m = std::max(m, std::abs(a.d_theta[i][j] - b.d_theta[i][j]));
    return m;
}

}  // namespace

int main(int argc, char** argv) {
    int n_per_class = 400;
    int k = 32;
    if (argc > 1) n_per_class = std::stoi(argv[1]);
    if (argc > 2) k = std::stoi(argv[2]);

    SyntheticConfig cfg;
    cfg.class_means = {{0.0, 0.0, 0.0, 0.0}, {2.0, 0.0, 1.0, 0.0},
                       {0.0, 2.0, 0.0, 1.0}, {2.0, 2.0, 1.0, 1.0}};
    cfg.covariances.assign(4, {{1.0, 0.0, 0.0, 0.0},
                               {0.0, 1.0, 0.0, 0.0},
                               {0.0, 0.0, 1.0, 0.0},
                               {0.0, 0.0, 0.0, 1.0}});
    cfg.instances_per_class = n_per_class;
    cfg.m_min = 4;
    cfg.m_max = 16;
    cfg.seed = 7;
    const Dataset data = generate_figure1_toy(cfg);

    Rng rng(11);
    Model m;
    m.codebook.centers.assign(k, Vec(data.dim));
    for (Vec& mu : m.codebook.centers)
        for (double& e : mu) e = rng.normal();
    m.codebook.beta = 0.8;
    m.weights = zero_weights(data.classes, k, 0.1);
    for (Vec& row : m.weights.theta)
        for (double& t : row) t = 0.5 * rng.normal();

    std::printf("instances=%zu  K=%d  D=%d  C=%d  threads=%d\n", data.size(), k, data.dim,
                data.classes, hardware_threads());

    const double obj_ref = reference::dataset_objective(data, m);
    const double obj_ser = dataset_objective(data, m, Execution::Serial);
    const double obj_par = dataset_objective(data, m, Execution::Parallel);
    std::printf("objective agreement: |ref-serial|=%.3g  |serial-parallel|=%.3g\n",
                std::abs(obj_ref - obj_ser), std::abs(obj_ser - obj_par));

    const GradientBundle g_ref = reference::analytic_gradient(data, m);
    const GradientBundle g_par = analytic_gradient(data, m, Execution::Parallel);
    std::printf("gradient agreement:  max|ref-parallel|=%.3g\n", max_abs_diff(g_ref, g_par));

    const int reps = 5;
    const double t_obj_ref = time_ms([&] { reference::dataset_objective(data, m); }, reps);
    const double t_obj_ser = time_ms([&] { dataset_objective(data, m, Execution::Serial); }, reps);
    const double t_obj_par = time_ms([&] { dataset_objective(data, m, Execution::Parallel); }, reps);
    std::printf("objective ms: reference %.2f | serial %.2f | parallel %.2f | speedup x%.2f\n",
                t_obj_ref, t_obj_ser, t_obj_par, t_obj_ser / t_obj_par);

    const double t_grad_ref = time_ms([&] { reference::analytic_gradient(data, m); }, reps);
    const double t_grad_ser = time_ms([&] { analytic_gradient(data, m, Execution::Serial); }, reps);
    const double t_grad_par = time_ms([&] { analytic_gradient(data, m, Execution::Parallel); }, reps);
    std::printf("gradient ms:  reference %.2f | serial %.2f | parallel %.2f | speedup x%.2f\n",
                t_grad_ref, t_grad_ser, t_grad_par, t_grad_ser / t_grad_par);

    const std::vector<Vec> points = pooled_features(data);
    const double t_km_ser = time_ms([&] { kmeans(points, k, 3, 1, Execution::Serial); }, 1);
    const double t_km_par = time_ms([&] { kmeans(points, k, 3, 1, Execution::Parallel); }, 1);
    std::printf("kmeans ms:    serial %.2f | parallel %.2f | speedup x%.2f\n", t_km_ser, t_km_par,
                t_km_ser / t_km_par);
    return 0;
}
