#include "proto/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace proto {

namespace {

constexpr std::size_t kGradBlock = 256;

// Everything one instance contributes to the dataset gradient. theta rows are
// kept factored as residual (x) encoding and expanded during the ordered fold.
// Scratch buffers live in the slot so repeated calls stay allocation-free.
struct InstanceTerms {
    std::vector<Vec> d_centers;  // K x D
    double d_beta = 0.0;
    Vec residual;                // C: label_i - sigma_i
    Vec z;                       // K
    // scratch
    Vec f, d2;        // K
    Vec f_all, d2_all;  // M*K flat per-feature stores
    Vec g;            // K: dL/dz
    Vec sigma;        // C
};

// All slot memory is allocated here, on the calling thread, so the parallel
// map never touches the allocator (cross-thread malloc/free churn would
// serialize the workers).
void preallocate_terms(InstanceTerms& t, int k, int d, int c, int m_max) {
    t.d_centers.assign(k, Vec(d, 0.0));
    t.residual.assign(c, 0.0);
    t.z.assign(k, 0.0);
    t.f.reserve(k);
    t.d2.reserve(k);
    t.f_all.reserve(static_cast<std::size_t>(m_max) * k);
    t.d2_all.reserve(static_cast<std::size_t>(m_max) * k);
    t.g.reserve(k);
    t.sigma.reserve(c);
}

void reset_terms(InstanceTerms& t, int c, int k) {
    for (Vec& row : t.d_centers) std::fill(row.begin(), row.end(), 0.0);
    t.d_beta = 0.0;
    t.residual.assign(c, 0.0);
    t.z.assign(k, 0.0);
}

// Fused per-instance center/beta gradient:
//   dL/dmu_l = (1/M) sum_x 2 beta f_l (g_l - <g,f>) (x - mu_l)
//   dL/dbeta = (1/M) sum_x (<g,f> dbar2 - sum_k g_k f_k d2_k)
// which is the Jacobian chain collapsed over k.
void instance_gradient(const Instance& inst, const Model& m, InstanceTerms& t) {
    const Codebook& cb = m.codebook;
    const Weights& w = m.weights;
    const int k = cb.size();
    const int d = cb.dim();
    const int c = w.classes();
    const int count = static_cast<int>(inst.features.size());
    reset_terms(t, c, k);

    // pass 1: assignments, distances, pooled encoding
    t.f_all.resize(static_cast<std::size_t>(count) * k);
    t.d2_all.resize(static_cast<std::size_t>(count) * k);
    const double pool = 1.0 / static_cast<double>(count);
    for (int mi = 0; mi < count; ++mi) {
        soft_assign_into(inst.features[mi], cb, t.f, t.d2);
        double* fs = t.f_all.data() + static_cast<std::size_t>(mi) * k;
        double* ds = t.d2_all.data() + static_cast<std::size_t>(mi) * k;
        for (int i = 0; i < k; ++i) {
            fs[i] = t.f[i];
            ds[i] = t.d2[i];
            t.z[i] += t.f[i];
        }
    }
    for (int i = 0; i < k; ++i) t.z[i] *= pool;

    // residuals and dL/dz
    t.sigma.resize(c);
    double top = -HUGE_VAL;
    for (int i = 0; i < c; ++i) {
        double dot = 0.0;
        for (int j = 0; j < k; ++j) dot += w.theta[i][j] * t.z[j];
        t.sigma[i] = dot;
        top = std::max(top, dot);
    }
    double norm = 0.0;
    for (int i = 0; i < c; ++i) {
        t.sigma[i] = std::exp(t.sigma[i] - top);
        norm += t.sigma[i];
    }
    t.g.assign(k, 0.0);
    for (int i = 0; i < c; ++i) {
        t.residual[i] = inst.label[i] - t.sigma[i] / norm;
        for (int j = 0; j < k; ++j) t.g[j] += t.residual[i] * w.theta[i][j];
    }

    // pass 2: chain into centers and beta
    for (int mi = 0; mi < count; ++mi) {
        const double* fs = t.f_all.data() + static_cast<std::size_t>(mi) * k;
        const double* ds = t.d2_all.data() + static_cast<std::size_t>(mi) * k;
        const Vec& x = inst.features[mi];
        double gf = 0.0;   // <g, f>
        double mean_d2 = 0.0;
        double gfd = 0.0;  // sum_k g_k f_k d2_k
        for (int i = 0; i < k; ++i) {
            gf += t.g[i] * fs[i];
            mean_d2 += ds[i] * fs[i];
            gfd += t.g[i] * fs[i] * ds[i];
        }
        for (int l = 0; l < k; ++l) {
            const double coef = pool * 2.0 * cb.beta * fs[l] * (t.g[l] - gf);
            Vec& row = t.d_centers[l];
            const Vec& mu = cb.centers[l];
            for (int j = 0; j < d; ++j) row[j] += coef * (x[j] - mu[j]);
        }
        t.d_beta += pool * (gf * mean_d2 - gfd);
    }
}

GradientBundle assemble(const Dataset& data, const Model& m, Execution exec) {
    check_conformable(data, m);
    const int k = m.codebook.size();
    const int d = m.codebook.dim();
    const int c = m.weights.classes();

    GradientBundle acc;
    acc.d_centers.assign(k, Vec(d, 0.0));
    acc.d_theta.assign(c, Vec(k, 0.0));

    int m_max = 1;
    for (const Instance& inst : data.instances)
        m_max = std::max(m_max, static_cast<int>(inst.features.size()));

    std::vector<InstanceTerms> slots(std::min<std::size_t>(kGradBlock, std::max<std::size_t>(data.size(), 1)));
    for (InstanceTerms& t : slots) preallocate_terms(t, k, d, c, m_max);
    blocked_map_fold(
        data.size(), exec, slots,
        [&](std::size_t n, InstanceTerms& t) { instance_gradient(data.instances[n], m, t); },
        [&](std::size_t, const InstanceTerms& t) {
            for (int l = 0; l < k; ++l)
                for (int j = 0; j < d; ++j) acc.d_centers[l][j] += t.d_centers[l][j];
            acc.d_beta += t.d_beta;
            for (int i = 0; i < c; ++i) {
                const double r = t.residual[i];
                for (int j = 0; j < k; ++j) acc.d_theta[i][j] += r * t.z[j];
            }
        });

    for (int i = 0; i < c; ++i)
        for (int j = 0; j < k; ++j) acc.d_theta[i][j] -= 2.0 * m.weights.lambda * m.weights.theta[i][j];
    if (m.weights.beta_log_penalty != 0.0)
        acc.d_beta -= 2.0 * m.weights.beta_log_penalty * std::log(m.codebook.beta) / m.codebook.beta;
    acc.d_log_beta = m.codebook.beta * acc.d_beta;
    return acc;
}

double rel_error(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

Vec grad_wrt_encoding(const Vec& z, const Vec& label, const Weights& w) {
    if (static_cast<int>(label.size()) != w.classes())
        throw std::invalid_argument("dimension mismatch: label vs theta");
    const Vec sigma = class_posterior(z, w);
    Vec g(z.size(), 0.0);
    for (int i = 0; i < w.classes(); ++i) {
        const double r = label[i] - sigma[i];
        const Vec& row = w.theta[i];
        for (std::size_t j = 0; j < z.size(); ++j) g[j] += r * row[j];
    }
    return g;
}

EncodingJacobian encoding_jacobian(const std::vector<Vec>& features, const Codebook& cb) {
    if (features.empty()) throw std::invalid_argument("empty feature set");
    const int k = cb.size();
    const int d = cb.dim();
    EncodingJacobian jac;
    jac.d_centers.assign(k, std::vector<Vec>(k, Vec(d, 0.0)));
    jac.d_beta.assign(k, 0.0);

    const double pool = 1.0 / static_cast<double>(features.size());
    Vec d2(k);
    for (const Vec& x : features) {
        const Vec f = soft_assign(x, cb);
        double mean_d2 = 0.0;
        for (int i = 0; i < k; ++i) {
            d2[i] = squared_distance(cb.centers[i], x);
            mean_d2 += d2[i] * f[i];
        }
        for (int i = 0; i < k; ++i) {
            for (int l = 0; l < k; ++l) {
                Vec& row = jac.d_centers[i][l];
                const Vec& mu = cb.centers[l];
                if (i == l) {
                    const double coef = pool * 2.0 * cb.beta * f[i] * (1.0 - f[i]);
                    for (int j = 0; j < d; ++j) row[j] += coef * (x[j] - mu[j]);
                } else {
                    const double coef = pool * 2.0 * cb.beta * f[i] * f[l];
                    for (int j = 0; j < d; ++j) row[j] += coef * (mu[j] - x[j]);
                }
            }
            jac.d_beta[i] += pool * f[i] * (mean_d2 - d2[i]);
        }
    }
    return jac;
}

CodebookGrad grad_codebook(const Dataset& data, const Model& m, Execution exec) {
    GradientBundle b = assemble(data, m, exec);
    return CodebookGrad{std::move(b.d_centers), b.d_beta, b.d_log_beta};
}

std::vector<Vec> grad_theta(const Dataset& data, const Model& m, Execution exec) {
    return assemble(data, m, exec).d_theta;
}

GradientBundle analytic_gradient(const Dataset& data, const Model& m, Execution exec) {
    return assemble(data, m, exec);
}

GradientBundle fd_gradient(const Dataset& data, const Model& m, double step, Execution exec) {
    if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
    check_conformable(data, m);
    const int k = m.codebook.size();
    const int d = m.codebook.dim();
    const int c = m.weights.classes();

    GradientBundle out;
    out.d_centers.assign(k, Vec(d, 0.0));
    out.d_theta.assign(c, Vec(k, 0.0));

    Model probe = m;
    const auto central = [&](double& coord) {
        const double saved = coord;
        const double hi = saved + step;
        const double lo = saved - step;
        coord = hi;
        const double f_hi = dataset_objective(data, probe, exec);
        coord = lo;
        const double f_lo = dataset_objective(data, probe, exec);
        coord = saved;
        return (f_hi - f_lo) / (hi - lo);
    };

    for (int l = 0; l < k; ++l)
        for (int j = 0; j < d; ++j) out.d_centers[l][j] = central(probe.codebook.centers[l][j]);
    out.d_beta = central(probe.codebook.beta);
    out.d_log_beta = m.codebook.beta * out.d_beta;
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < k; ++j) out.d_theta[i][j] = central(probe.weights.theta[i][j]);
    return out;
}

double FiniteDiffReport::max_rel() const {
    return std::max({max_rel_centers, max_rel_beta, max_rel_theta});
}

FiniteDiffReport compare_gradients(const GradientBundle& a, const GradientBundle& b, double step) {
    FiniteDiffReport rep;
    rep.step = step;
    for (std::size_t l = 0; l < a.d_centers.size(); ++l)
        for (std::size_t j = 0; j < a.d_centers[l].size(); ++j)
            rep.max_rel_centers = std::max(rep.max_rel_centers, rel_error(a.d_centers[l][j], b.d_centers[l][j]));
    rep.max_rel_beta = rel_error(a.d_beta, b.d_beta);
    for (std::size_t i = 0; i < a.d_theta.size(); ++i)
        for (std::size_t j = 0; j < a.d_theta[i].size(); ++j)
            rep.max_rel_theta = std::max(rep.max_rel_theta, rel_error(a.d_theta[i][j], b.d_theta[i][j]));
    return rep;
}

FiniteDiffReport finite_diff_check(const Dataset& data, const Model& m, double step, Execution exec) {
    return compare_gradients(analytic_gradient(data, m, exec), fd_gradient(data, m, step, exec), step);
}

}  // namespace proto
