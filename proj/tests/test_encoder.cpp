#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "proto/encoder.hpp"
#include "proto/rng.hpp"

using namespace proto;

namespace {

Codebook two_centers_1d(double beta) {
    Codebook cb;
    cb.centers = {{0.0}, {2.0}};
    cb.beta = beta;
    return cb;
}

double simplex_gap(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return std::abs(s - 1.0);
}

}  // namespace

TEST_CASE("soft_assign: frozen scalar case") {
    const Vec f = soft_assign({0.0}, two_centers_1d(0.5));
    CHECK(f[0] == doctest::Approx(0.8807970779778824).epsilon(1e-12));
    CHECK(f[1] == doctest::Approx(0.1192029220221176).epsilon(1e-12));
}

TEST_CASE("soft_assign: single center and tiny beta") {
    Codebook one;
    one.centers = {{3.0, -1.0}};
    one.beta = 2.0;
    CHECK(soft_assign({0.0, 0.0}, one) == Vec{1.0});

    Codebook cb = two_centers_1d(1e-30);
    const Vec f = soft_assign({0.7}, cb);
    CHECK(f[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(f[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("soft_assign: no overflow at huge beta") {
    Codebook cb = two_centers_1d(1e4);
    const Vec f = soft_assign({0.1}, cb);
    CHECK(all_finite(f));
    CHECK(f[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("soft_assign rejects bad input") {
    CHECK_THROWS(soft_assign({0.0, 1.0}, two_centers_1d(0.5)));  // D mismatch
    CHECK_THROWS(soft_assign({std::nan("")}, two_centers_1d(0.5)));
    Codebook cb = two_centers_1d(0.5);
    cb.beta = 0.0;
    CHECK_THROWS(soft_assign({0.0}, cb));
}

TEST_CASE("hard_assign: nearest center, ties to lowest index") {
    const Codebook cb = two_centers_1d(0.5);
    CHECK(hard_assign({0.5}, cb) == Vec{1.0, 0.0});
    CHECK(hard_assign({1.0}, cb) == Vec{1.0, 0.0});  // equidistant
    CHECK(hard_assign({1.5}, cb) == Vec{0.0, 1.0});
}

TEST_CASE("hard limit: soft matches hard at beta = 1e4 with gap >= 0.1") {
    Rng rng(41);
    int tried = 0;
    while (tried < 200) {
        Codebook cb;
        const int k = static_cast<int>(rng.uniform_int(2, 5));
        const int d = static_cast<int>(rng.uniform_int(1, 3));
        cb.centers.assign(k, Vec(d));
        for (Vec& mu : cb.centers)
            for (double& e : mu) e = 2.0 * rng.normal();
        cb.beta = 1e4;
        Vec x(d);
        for (double& e : x) e = 2.0 * rng.normal();

        Vec d2(k);
        for (int i = 0; i < k; ++i) d2[i] = squared_distance(cb.centers[i], x);
        std::sort(d2.begin(), d2.end());
        if (d2[1] - d2[0] < 0.1) continue;  // enforce the squared-distance gap
        ++tried;

        const Vec fs = soft_assign(x, cb);
        const Vec fh = hard_assign(x, cb);
        for (int i = 0; i < k; ++i) CHECK(std::abs(fs[i] - fh[i]) <= 1e-6);
    }
}

TEST_CASE("hard limit: analytic envelope (K-1) exp(-beta gap)") {
    Rng rng(42);
    for (int rep = 0; rep < 50; ++rep) {
        Codebook cb;
        const int k = static_cast<int>(rng.uniform_int(2, 6));
        cb.centers.assign(k, Vec(2));
        for (Vec& mu : cb.centers)
            for (double& e : mu) e = 3.0 * rng.normal();
        cb.beta = rng.uniform(1.0, 50.0);
        Vec x{3.0 * rng.normal(), 3.0 * rng.normal()};

        Vec d2(k);
        for (int i = 0; i < k; ++i) d2[i] = squared_distance(cb.centers[i], x);
        Vec sorted = d2;
        std::sort(sorted.begin(), sorted.end());
        const double gap = sorted[1] - sorted[0];
        if (gap <= 0.0) continue;

        const Vec fs = soft_assign(x, cb);
        const Vec fh = hard_assign(x, cb);
        double inf_norm = 0.0;
        for (int i = 0; i < k; ++i) inf_norm = std::max(inf_norm, std::abs(fs[i] - fh[i]));
        CHECK(inf_norm <= (k - 1) * std::exp(-cb.beta * gap) + 1e-12);
    }
}

TEST_CASE("encode_instance: mirror symmetry and pooling") {
    const Codebook cb = two_centers_1d(0.5);
    const Vec z = encode_instance({{0.0}, {2.0}}, cb, Assign::Soft);
    CHECK(z[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(z[1] == doctest::Approx(0.5).epsilon(1e-15));

    // single element: exactly soft_assign
    const Vec z1 = encode_instance({{0.3}}, cb, Assign::Soft);
    CHECK(z1 == soft_assign({0.3}, cb));

    // hard mode, both nearest mu_1
    CHECK(encode_instance({{0.0}, {0.5}}, cb, Assign::Hard) == Vec{1.0, 0.0});

    CHECK_THROWS(encode_instance({}, cb, Assign::Soft));
}

TEST_CASE("property: simplex outputs within 1e-12") {
    Rng rng(43);
    for (int rep = 0; rep < 500; ++rep) {
        const int k = static_cast<int>(rng.uniform_int(1, 6));
        const int d = static_cast<int>(rng.uniform_int(1, 4));
        Codebook cb;
        cb.centers.assign(k, Vec(d));
        for (Vec& mu : cb.centers)
            for (double& e : mu) e = 4.0 * rng.normal();
        cb.beta = std::exp(rng.uniform(-3.0, 3.0));

        Vec x(d);
        for (double& e : x) e = 4.0 * rng.normal();
        CHECK(simplex_gap(soft_assign(x, cb)) <= 1e-12);

        std::vector<Vec> feats(rng.uniform_int(1, 5), Vec(d));
        for (Vec& v : feats)
            for (double& e : v) e = 4.0 * rng.normal();
        CHECK(simplex_gap(encode_instance(feats, cb, Assign::Soft)) <= 1e-12);
        CHECK(simplex_gap(encode_instance(feats, cb, Assign::Hard)) <= 1e-12);
    }
}

TEST_CASE("property: translation equivariance") {
    Rng rng(44);
    for (int rep = 0; rep < 100; ++rep) {
        const int k = 3, d = 2;
        Codebook cb;
        cb.centers.assign(k, Vec(d));
        for (Vec& mu : cb.centers)
            for (double& e : mu) e = rng.normal();
        cb.beta = 0.7;
        Vec x{rng.normal(), rng.normal()};
        Vec offset{rng.normal(), rng.normal()};

        Codebook shifted = cb;
        Vec xs = x;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < d; ++j) shifted.centers[i][j] += offset[j];
        for (int j = 0; j < d; ++j) xs[j] += offset[j];

        const Vec a = soft_assign(x, cb);
        const Vec b = soft_assign(xs, shifted);
        for (int i = 0; i < k; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
    }
}

TEST_CASE("property: permutation equivariance") {
    Codebook cb;
    cb.centers = {{0.0, 0.0}, {1.0, 2.0}, {-1.0, 0.5}};
    cb.beta = 1.3;
    Codebook swapped;
    swapped.centers = {{1.0, 2.0}, {-1.0, 0.5}, {0.0, 0.0}};  // rotate left
    swapped.beta = 1.3;

    const std::vector<Vec> feats{{0.2, -0.1}, {1.4, 0.3}};
    const Vec z = encode_instance(feats, cb, Assign::Soft);
    const Vec zp = encode_instance(feats, swapped, Assign::Soft);
    // permuting centers permutes components; normalization order shifts ulps
    CHECK(zp[0] == doctest::Approx(z[1]).epsilon(1e-14));
    CHECK(zp[1] == doctest::Approx(z[2]).epsilon(1e-14));
    CHECK(zp[2] == doctest::Approx(z[0]).epsilon(1e-14));
}
