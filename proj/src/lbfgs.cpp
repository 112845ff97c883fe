#include "proto/lbfgs.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace proto {

namespace {

double sup_norm(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

struct Pair {
    Vec s;
    Vec y;
    double rho;
};

// Internally everything minimizes phi = -f.
struct Evaluator {
    const ObjectiveFn& f;
    std::size_t n;

    double operator()(const Vec& x, Vec& grad) const {
        grad.assign(n, 0.0);
        const double v = f(x, grad);
        for (double& g : grad) g = -g;
        return -v;
    }
};

struct LineSearchResult {
    bool ok = false;
    double alpha = 0.0;
    double phi = 0.0;
    Vec x;
    Vec grad;
};

// Strong-Wolfe search on phi(alpha) = phi(x + alpha p), bracketing then zoom
// by bisection. If the curvature condition cannot be met in the budget, the
// best sufficient-decrease point found is accepted; with no decrease at all
// the search reports failure.
LineSearchResult line_search(const Evaluator& eval, const Vec& x, const Vec& p, double phi0,
                             double dphi0, double c1, double c2) {
    LineSearchResult best;  // best sufficient-decrease point seen

    Vec xt(x.size());
    Vec gt(x.size());
    const auto probe = [&](double alpha, double& phi, double& dphi) {
        for (std::size_t i = 0; i < x.size(); ++i) xt[i] = x[i] + alpha * p[i];
        phi = eval(xt, gt);
        dphi = dot(gt, p);
    };
    const auto sufficient = [&](double alpha, double phi) {
        return phi <= phi0 + c1 * alpha * dphi0;
    };
    const auto remember = [&](double alpha, double phi) {
        if (!best.ok || phi < best.phi) {
            best.ok = true;
            best.alpha = alpha;
            best.phi = phi;
            best.x = xt;
            best.grad = gt;
        }
    };

    const int budget = 60;
    double lo = 0.0, phi_lo = phi0, dphi_lo = dphi0;
    double hi = 0.0, phi_hi = 0.0;
    bool bracketed = false;

    double alpha = 1.0;
    double alpha_prev = 0.0, phi_prev = phi0;
    int used = 0;
    for (; used < budget; ++used) {
        double phi, dphi;
        probe(alpha, phi, dphi);
        if (!std::isfinite(phi)) {  // overshot into bad territory; shrink
            alpha = alpha_prev + 0.5 * (alpha - alpha_prev);
            continue;
        }
        if (!sufficient(alpha, phi) || (used > 0 && phi >= phi_prev)) {
            lo = alpha_prev;
            phi_lo = phi_prev;
            hi = alpha;
            phi_hi = phi;
            bracketed = true;
            break;
        }
        remember(alpha, phi);
        if (std::abs(dphi) <= -c2 * dphi0) {
            best.alpha = alpha;
            best.phi = phi;
            best.x = xt;
            best.grad = gt;
            best.ok = true;
            return best;
        }
        if (dphi >= 0.0) {
            lo = alpha;
            phi_lo = phi;
            hi = alpha_prev;
            phi_hi = phi_prev;
            bracketed = true;
            break;
        }
        alpha_prev = alpha;
        phi_prev = phi;
        alpha *= 2.0;
    }

    if (bracketed) {
        (void)phi_hi;
        (void)dphi_lo;
        for (; used < budget; ++used) {
            const double mid = 0.5 * (lo + hi);
            if (std::abs(hi - lo) < 1e-16 * std::max(1.0, std::abs(lo))) break;
            double phi, dphi;
            probe(mid, phi, dphi);
            if (!std::isfinite(phi) || !sufficient(mid, phi) || phi >= phi_lo) {
                hi = mid;
                continue;
            }
            remember(mid, phi);
            if (std::abs(dphi) <= -c2 * dphi0) {
                best.alpha = mid;
                best.phi = phi;
                best.x = xt;
                best.grad = gt;
                return best;
            }
            if (dphi * (hi - lo) >= 0.0) hi = lo;
            lo = mid;
            phi_lo = phi;
        }
    }
    return best;  // ok only if some sufficient-decrease point was found
}

}  // namespace

OptimResult quasi_newton_maximize(const ObjectiveFn& f, Vec x0, const OptimizerConfig& cfg) {
    if (!(cfg.gradient_tolerance > 0.0))
        throw std::invalid_argument("gradient_tolerance must be positive");
    if (cfg.history_size < 1) throw std::invalid_argument("history_size must be >= 1");
    if (!(cfg.wolfe_c1 > 0.0 && cfg.wolfe_c1 < cfg.wolfe_c2 && cfg.wolfe_c2 < 1.0))
        throw std::invalid_argument("wolfe constants must satisfy 0 < c1 < c2 < 1");

    const std::size_t n = x0.size();
    const Evaluator eval{f, n};

    Vec x = std::move(x0);
    Vec g(n);
    double phi = eval(x, g);
    if (!std::isfinite(phi)) throw std::invalid_argument("objective not finite at x0");

    std::deque<Pair> history;
    Vec p(n), q(n);
    int it = 0;
    bool converged = sup_norm(g) <= cfg.gradient_tolerance;

    while (!converged && it < cfg.max_iterations) {
        // Two-loop recursion: p = -H g.
        q = g;
        std::vector<double> alpha_mem(history.size());
        for (std::size_t idx = history.size(); idx-- > 0;) {
            const Pair& pr = history[idx];
            alpha_mem[idx] = pr.rho * dot(pr.s, q);
            for (std::size_t i = 0; i < n; ++i) q[i] -= alpha_mem[idx] * pr.y[i];
        }
        double gamma = 1.0;
        if (!history.empty()) {
            const Pair& last = history.back();
            gamma = dot(last.s, last.y) / dot(last.y, last.y);
        }
        for (std::size_t i = 0; i < n; ++i) q[i] *= gamma;
        for (std::size_t idx = 0; idx < history.size(); ++idx) {
            const Pair& pr = history[idx];
            const double beta = pr.rho * dot(pr.y, q);
            for (std::size_t i = 0; i < n; ++i) q[i] += (alpha_mem[idx] - beta) * pr.s[i];
        }
        for (std::size_t i = 0; i < n; ++i) p[i] = -q[i];

        double dphi0 = dot(g, p);
        if (dphi0 >= 0.0) {  // stale curvature; fall back to steepest descent
            history.clear();
            for (std::size_t i = 0; i < n; ++i) p[i] = -g[i];
            dphi0 = -dot(g, g);
            if (dphi0 >= 0.0) break;
        }

        LineSearchResult ls = line_search(eval, x, p, phi, dphi0, cfg.wolfe_c1, cfg.wolfe_c2);
        if (!ls.ok) break;

        Vec s(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = ls.x[i] - x[i];
            y[i] = ls.grad[i] - g[i];
        }
        const double sy = dot(s, y);
        if (sy > 1e-10 * norm2(s) * norm2(y)) {
            history.push_back(Pair{std::move(s), std::move(y), 1.0 / sy});
            if (static_cast<int>(history.size()) > cfg.history_size) history.pop_front();
        }

        x = std::move(ls.x);
        g = std::move(ls.grad);
        phi = ls.phi;
        ++it;
        converged = sup_norm(g) <= cfg.gradient_tolerance;
    }

    return OptimResult{std::move(x), -phi, it, converged};
}

}  // namespace proto
