#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "relucert/linalg.hpp"
#include "relucert/rng.hpp"

using namespace relucert;

namespace {

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m.at(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    return m;
}

}  // namespace

TEST_CASE("jacobi eigenvalues of a known symmetric matrix") {
    // eigenvalues of [[2,1],[1,2]] are 1 and 3
    Matrix a = from_rows({{2, 1}, {1, 2}});
    auto ev = jacobi_eigenvalues(a);
    CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ev[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("jacobi eigenvectors diagonalize random SPD matrices") {
    CounterRng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + static_cast<int>(rng.next_double() * 6);
        Matrix b(n + 3, n);
        for (double& v : b.data) v = rng.next_gaussian();
        Matrix g = gram(b);
        EigenResult eig = jacobi_eigen(g);
        // g * v_j = lambda_j * v_j
        for (int j = 0; j < n; ++j) {
            std::vector<double> v(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = eig.vectors.at(i, j);
            std::vector<double> gv = matvec(g, v);
            for (int i = 0; i < n; ++i)
                CHECK(gv[static_cast<std::size_t>(i)] ==
                      doctest::Approx(eig.values[static_cast<std::size_t>(j)] *
                                      v[static_cast<std::size_t>(i)])
                          .epsilon(1e-8)
                          .scale(std::abs(eig.values.back()) + 1));
        }
    }
}

TEST_CASE("numerical rank") {
    CHECK(numerical_rank(from_rows({{1, 0}, {0, 1}})) == 2);
    CHECK(numerical_rank(from_rows({{1, 0}, {2, 0}})) == 1);
    CHECK(numerical_rank(from_rows({{1, 2, 3}, {2, 4, 6}, {1, 1, 1}})) == 2);
    // Scale invariance of the threshold: global scaling never changes rank,
    // and a 1e-12 singular-value ratio counts as deficient.
    CHECK(numerical_rank(from_rows({{1e8, 0}, {0, 1e8}})) == 2);
    CHECK(numerical_rank(from_rows({{1e-8, 0}, {0, 1e-8}})) == 2);
    CHECK(numerical_rank(from_rows({{1e8, 0}, {0, 1e-4}})) == 1);
}

TEST_CASE("cholesky solve") {
    Matrix spd = from_rows({{4, 1, 0}, {1, 3, 1}, {0, 1, 2}});
    std::vector<double> x{1.0, -2.0, 0.5};
    std::vector<double> rhs = matvec(spd, x);
    auto sol = spd_solve(spd, rhs);
    for (int i = 0; i < 3; ++i)
        CHECK(sol[static_cast<std::size_t>(i)] ==
              doctest::Approx(x[static_cast<std::size_t>(i)]).epsilon(1e-12));
}

TEST_CASE("cholesky rejects indefinite input") {
    Matrix bad = from_rows({{1, 2}, {2, 1}});
    CHECK_THROWS(cholesky(bad));
}

TEST_CASE("binomial with cap") {
    CHECK(binomial_capped(6, 2, 1000) == 15);
    CHECK(binomial_capped(10, 5, 1000) == 252);
    CHECK(binomial_capped(40, 10, 1000000) == 1000001);  // saturates
    CHECK(binomial_capped(5, 0, 10) == 1);
    CHECK(binomial_capped(120, 10, 1000000) == 1000001);
}

TEST_CASE("subset enumeration is lexicographic and complete") {
    std::vector<std::vector<int>> seen;
    for_each_subset(5, 3, [&](const std::vector<int>& s) {
        seen.push_back(s);
        return true;
    });
    CHECK(seen.size() == 10);
    CHECK(seen.front() == std::vector<int>{0, 1, 2});
    CHECK(seen.back() == std::vector<int>{2, 3, 4});
}

TEST_CASE("spectral norm") {
    Matrix a = from_rows({{3, 0}, {0, 4}});
    CHECK(spectral_norm(a) == doctest::Approx(4.0).epsilon(1e-12));
}
