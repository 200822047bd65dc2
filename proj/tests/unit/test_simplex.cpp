#include <doctest.h>

#include <gmpxx.h>

#include "spinfactor/simplex.hpp"

using namespace spinfactor::lp;

TEST_SUITE("simplex") {
  TEST_CASE("textbook maximum") {
    // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
    Program<mpq_class> p;
    p.num_vars = 2;
    p.objective = {3, 5};
    p.rows = {{{1, 0}, Sense::LessEqual, 4},
              {{0, 2}, Sense::LessEqual, 12},
              {{3, 2}, Sense::LessEqual, 18}};
    const auto r = solve(p);
    REQUIRE(r.status == Status::Optimal);
    CHECK(r.objective == 36);
    CHECK(r.x[0] == 2);
    CHECK(r.x[1] == 6);
  }

  TEST_CASE("equality and lower bounds") {
    // max -x - y, x + y = 3, x >= 1 -> -3
    Program<mpq_class> p;
    p.num_vars = 2;
    p.objective = {-1, -1};
    p.rows = {{{1, 1}, Sense::Equal, 3}, {{1, 0}, Sense::GreaterEqual, 1}};
    const auto r = solve(p);
    REQUIRE(r.status == Status::Optimal);
    CHECK(r.objective == -3);
    CHECK(r.x[0] >= 1);
  }

  TEST_CASE("exact rational vertex") {
    // max x, 3x <= 1 -> 1/3 exactly
    Program<mpq_class> p;
    p.num_vars = 1;
    p.objective = {1};
    p.rows = {{{3}, Sense::LessEqual, 1}};
    const auto r = solve(p);
    REQUIRE(r.status == Status::Optimal);
    CHECK(r.x[0] == mpq_class(1, 3));
  }

  TEST_CASE("infeasible") {
    Program<mpq_class> p;
    p.num_vars = 1;
    p.objective = {1};
    p.rows = {{{1}, Sense::LessEqual, 1}, {{1}, Sense::GreaterEqual, 2}};
    const auto r = solve(p);
    CHECK(r.status == Status::Infeasible);
    CHECK(r.infeasibility > 0);
  }

  TEST_CASE("unbounded") {
    Program<double> p;
    p.num_vars = 2;
    p.objective = {1, 0};
    p.rows = {{{0, 1}, Sense::LessEqual, 1}};
    CHECK(solve(p).status == Status::Unbounded);
  }

  TEST_CASE("degenerate problem terminates") {
    // Beale's cycling example under the largest-coefficient rule.
    Program<mpq_class> p;
    p.num_vars = 4;
    p.objective = {mpq_class(3, 4), -150, mpq_class(1, 50), -6};
    p.rows = {{{mpq_class(1, 4), -60, mpq_class(-1, 25), 9}, Sense::LessEqual, 0},
              {{mpq_class(1, 2), -90, mpq_class(-1, 50), 3}, Sense::LessEqual, 0},
              {{0, 0, 1, 0}, Sense::LessEqual, 1}};
    const auto r = solve(p);
    REQUIRE(r.status == Status::Optimal);
    CHECK(r.objective == mpq_class(1, 20));
  }
}
