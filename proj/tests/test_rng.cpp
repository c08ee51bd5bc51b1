#include <doctest.h>

#include <cmath>
#include <vector>

#include "lcrec/rng.hpp"

using namespace lcrec;

TEST_CASE("same seed gives identical streams") {
    Rng a(123), b(123);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
    Rng a(1), b(2);
    int same = 0;
    for (int i = 0; i < 100; ++i) same += (a.next_u64() == b.next_u64());
    CHECK(same == 0);
}

TEST_CASE("uniform stays in [0,1) and covers the range") {
    Rng rng(7);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("normal has roughly unit variance") {
    Rng rng(11);
    double sum = 0.0, sq = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sq += x * x;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("uniform_index is unbiased over small ranges") {
    Rng rng(3);
    std::vector<int> counts(5, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[rng.uniform_index(5)];
    for (int c : counts) CHECK(std::abs(c - n / 5) < 600);
}

TEST_CASE("derived seeds are order-independent and distinct") {
    CHECK(derive_seed(42, 1, 2) != derive_seed(42, 2, 1));
    CHECK(stage_seed(42, "walks") != stage_seed(42, "split"));
    CHECK(stage_seed(42, "walks") == stage_seed(42, "walks"));
}

TEST_CASE("shuffle is deterministic per seed") {
    std::vector<int> a{1, 2, 3, 4, 5, 6, 7, 8}, b = a;
    Rng ra(9), rb(9);
    ra.shuffle(a);
    rb.shuffle(b);
    CHECK(a == b);
}
