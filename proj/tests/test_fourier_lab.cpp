#include <bit>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "majdyn/analytics.hpp"
#include "majdyn/fourier_lab.hpp"
#include "majdyn/numerics.hpp"

using namespace majdyn;

namespace {

// Subsets of the universe with at most `k` elements.
std::vector<std::uint32_t> small_sets(int edges, int k) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t s = 0; s < (1U << edges); ++s) {
    if (std::popcount(s) <= k) out.push_back(s);
  }
  return out;
}

// Z_v computed from the neighbour counts of the encoded graph directly.
double naive_z(const TinyModel& m, std::uint32_t v, std::uint32_t x) {
  int red = 0;
  int blue = 0;
  for (int e = 0; e < m.edge_count(); ++e) {
    if (!((x >> e) & 1U)) continue;
    const auto [a, b] = m.edge(e);
    if (a != v && b != v) continue;
    const std::uint32_t w = a == v ? b : a;
    (m.is_red(w) ? red : blue) += 1;
  }
  bool red_after = m.is_red(v);
  if (red > blue) red_after = true;
  if (blue > red) red_after = false;
  const bool kept = red_after == m.is_red(v);
  return (kept ? 1.0 : -1.0) - m.mu_of(v);
}

}  // namespace

TEST_CASE("basis_eval examples") {
  const TinyModel m(2, 2, 0.5);
  CHECK(basis_eval(m, EdgeSet{}, 0b101101) == 1.0);
  const EdgeSet e({{0, 1}});
  const int idx = m.edge_index(0, 1);
  CHECK(basis_eval(m, e, 1U << idx) == doctest::Approx(1.0));
  CHECK(basis_eval(m, e, 0) == doctest::Approx(-1.0));
  const TinyModel q(2, 2, 0.3);
  CHECK(basis_eval(q, e, 1U << idx) == doctest::Approx(std::sqrt(0.7 / 0.3)));
  CHECK(basis_eval(q, e, 0) == doctest::Approx(-std::sqrt(0.3 / 0.7)));
}

TEST_CASE("EdgeSet and model plumbing") {
  const EdgeSet s({{3, 1}, {0, 2}});
  CHECK(s.size() == 2);
  CHECK(s.pairs()[0] == std::pair<std::uint32_t, std::uint32_t>{0, 2});
  CHECK(s.pairs()[1] == std::pair<std::uint32_t, std::uint32_t>{1, 3});
  CHECK_THROWS_AS(EdgeSet({{1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(EdgeSet({{1, 2}, {2, 1}}), std::invalid_argument);
  const TinyModel m(3, 4, 0.4);
  CHECK(m.edge_count() == 21);
  CHECK(std::popcount(m.star_mask(2)) == 6);
  CHECK_THROWS(TinyModel(4, 4, 0.5));  // 28 edges exceeds the enumeration cap
  CHECK_THROWS(TinyModel(2, 2, 1.0));
}

TEST_CASE("Z_v from the dense engine matches a direct neighbour count") {
  for (auto [r, b, p] : {std::tuple{2u, 2u, 0.5}, {3u, 2u, 0.3}, {1u, 4u, 0.6}, {3u, 3u, 0.7}}) {
    const TinyModel m(r, b, p);
    for (std::uint64_t x = 0; x < m.assignment_count(); x += 7) {
      for (std::uint32_t v = 0; v < m.n(); ++v) {
        CHECK(m.z(v, static_cast<std::uint32_t>(x)) == naive_z(m, v, static_cast<std::uint32_t>(x)));
      }
    }
  }
}

TEST_CASE("pbiased_expectation basics") {
  const TinyModel m(2, 2, 0.3);
  CHECK(pbiased_expectation(m, [](std::uint32_t) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-15));
  for (std::uint32_t s = 1; s < 64; s += 5) {
    CHECK(std::fabs(pbiased_expectation(m, [&](std::uint32_t x) { return basis_eval(s, x, 0.3); })) <= 1e-12);
  }
  // Mean of Z_v vanishes.
  for (std::uint32_t v = 0; v < 4; ++v) {
    CHECK(std::fabs(pbiased_expectation(m, [&](std::uint32_t x) { return m.z(v, x); })) <= 1e-12);
  }
}

TEST_CASE("orthonormality of the basis on four vertices") {
  for (double p : {0.5, 0.3}) {
    const TinyModel m(2, 2, p);
    const auto sets = small_sets(m.edge_count(), 2);
    double worst = 0.0;
    for (auto s : sets) {
      for (auto t : sets) {
        const double e = pbiased_expectation(
            m, [&](std::uint32_t x) { return basis_eval(s, x, p) * basis_eval(t, x, p); });
        worst = std::max(worst, std::fabs(e - (s == t ? 1.0 : 0.0)));
      }
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("enumeration is independent of the worker count") {
  const TinyModel m(3, 3, 0.3);
  auto f = [&](std::uint32_t x) { return m.z(0, x) * m.z(4, x) + basis_eval(0b1011, x, 0.3); };
  const double one = pbiased_expectation(m, f, 1);
  CHECK(pbiased_expectation(m, f, 3) == one);
  CHECK(pbiased_expectation(m, f, 8) == one);
}

TEST_CASE("coefficients outside the star of v vanish, exhaustively on four vertices") {
  const TinyModel m(2, 2, 0.5);
  for (std::uint32_t v = 0; v < 4; ++v) {
    std::vector<double> z(m.assignment_count());
    for (std::uint32_t x = 0; x < z.size(); ++x) z[x] = m.z(v, x);
    const auto coef = pbiased_spectrum(m, z);
    CHECK(std::fabs(coef[0]) <= 1e-12);
    for (std::uint32_t s = 1; s < coef.size(); ++s) {
      if (s & ~m.star_mask(v)) CHECK(std::fabs(coef[s]) <= 1e-12);
    }
  }
  // brute-force route agrees for a couple of explicit sets
  CHECK(std::fabs(brute_force_coefficient(m, 0, EdgeSet({{2, 3}}))) <= 1e-12);
  CHECK(std::fabs(brute_force_coefficient(m, 0, EdgeSet{})) <= 1e-12);
  CHECK(std::fabs(brute_force_coefficient(m, 1, EdgeSet({{0, 1}, {2, 3}}))) <= 1e-12);
}

TEST_CASE("butterfly spectrum matches direct coefficients") {
  const TinyModel m(3, 2, 0.35);
  std::vector<double> z(m.assignment_count());
  for (std::uint32_t x = 0; x < z.size(); ++x) z[x] = m.z(1, x);
  const auto coef = pbiased_spectrum(m, z);
  for (std::uint32_t s : {0u, 1u, 3u, 0b1000000001u, 0b110u, 0b1111111111u}) {
    const double direct = pbiased_expectation(m, [&](std::uint32_t x) { return m.z(1, x) * basis_eval(s, x, 0.35); });
    CHECK(std::fabs(coef[s] - direct) <= 1e-12);
  }
}

TEST_CASE("Parseval on up to five vertices") {
  for (auto [r, b, p] : {std::tuple{2u, 2u, 0.5}, {2u, 3u, 0.3}, {1u, 4u, 0.8}, {3u, 2u, 0.6}}) {
    const TinyModel m(r, b, p);
    for (std::uint32_t v = 0; v < m.n(); ++v) {
      std::vector<double> z(m.assignment_count());
      for (std::uint32_t x = 0; x < z.size(); ++x) z[x] = m.z(v, x);
      const auto coef = pbiased_spectrum(m, z);
      double energy = 0.0;
      for (double c : coef) energy += c * c;
      const double second = pbiased_expectation(m, [&](std::uint32_t x) { return m.z(v, x) * m.z(v, x); });
      CHECK(std::fabs(energy - second) <= 1e-10);
      CHECK(std::fabs(second - (1 - m.mu_of(v) * m.mu_of(v))) <= 1e-12);
    }
  }
}

TEST_CASE("closed_form_coefficient examples") {
  CHECK(closed_form_coefficient(EdgeKind::RedBlue, 1, 1, 0.5) == doctest::Approx(-1.0));
  CHECK(closed_form_coefficient(EdgeKind::RedRed, 2, 0, 0.5) == 0.0);
  const auto rep = anticoncentration_report(499, 499, 0.5);
  const double big = closed_form_coefficient(EdgeKind::RedBlue, 500, 500, 0.5);
  CHECK(std::fabs(big) <= 2 * std::sqrt(0.25) * rep.sup_pmf + 1e-15);
  CHECK(std::fabs(big) > 0.0);
  CHECK_THROWS_AS(closed_form_coefficient(EdgeKind::RedRed, 1, 5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(closed_form_coefficient(EdgeKind::BlueBlue, 5, 1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(closed_form_coefficient(EdgeKind::RedBlue, 0, 5, 0.5), std::invalid_argument);
}

TEST_CASE("closed forms agree with brute force on every single edge") {
  for (std::uint32_t n : {4u, 5u, 6u}) {
    for (double p : {0.3, 0.5, 0.7}) {
      for (std::uint32_t r = 1; r < n; ++r) {
        const TinyModel m(r, n - r, p);
        for (std::uint32_t v = 0; v < n; ++v) {
          for (std::uint32_t w = 0; w < n; ++w) {
            if (w == v) continue;
            const bool rv = m.is_red(v);
            const bool rw = m.is_red(w);
            const EdgeKind kind = rv == rw ? (rv ? EdgeKind::RedRed : EdgeKind::BlueBlue) : EdgeKind::RedBlue;
            const double brute = brute_force_coefficient(m, v, EdgeSet({{v, w}}));
            CHECK(std::fabs(brute - closed_form_coefficient(kind, r, n - r, p)) <= 1e-12);
          }
        }
      }
    }
  }
}

TEST_CASE("verify_fourier_facts reports") {
  const auto a = verify_fourier_facts(TinyModel(2, 2, 0.5));
  CHECK(a.passes(1e-10));
  CHECK(a.vertices.size() == 4);
  CHECK(a.err_power_bound <= 1e-10);
  CHECK(a.err_star_reduction <= 1e-10);

  const auto b = verify_fourier_facts(TinyModel(3, 3, 0.3), 1);
  CHECK(b.err_second_moment <= 1e-10);
  CHECK(b.err_coef_empty <= 1e-10);
  CHECK(b.err_off_star <= 1e-10);
  CHECK(b.passes(1e-10));

  const auto j = b.to_json();
  CHECK(j.at("checks").contains("parseval"));
  CHECK(j.at("magnitudes").contains("max_single"));
  CHECK(j.at("vertices").size() == 6);
  CHECK_THROWS_AS(verify_fourier_facts(TinyModel(2, 2, 0.5), 0), std::invalid_argument);
}

TEST_CASE("moment_bruteforce examples") {
  const TinyModel m22(2, 2, 0.5);
  CHECK(std::fabs(moment_bruteforce(m22, 1).value) <= 1e-12);

  const auto second = moment_bruteforce(m22, 2);
  // Var(2|R_1|) straight from the |R_1| histogram.
  const auto hist = red_count_distribution(m22);
  double mean = 0;
  double sq = 0;
  for (std::size_t k = 0; k < hist.size(); ++k) {
    mean += k * hist[k];
    sq += double(k) * k * hist[k];
  }
  CHECK(std::fabs(second.value - 4 * (sq - mean * mean)) <= 1e-10);
  REQUIRE(second.var_two_r1.has_value());
  CHECK(std::fabs(second.value - *second.var_two_r1) <= 1e-10);
  REQUIRE(second.fourier_value.has_value());
  CHECK(std::fabs(second.value - *second.fourier_value) <= 1e-10);
  CHECK(second.main_term == doctest::Approx(4 * 4 * mu(m22.params())));

  const TinyModel m33(3, 3, 0.5);
  CHECK(std::fabs(moment_bruteforce(m33, 3).value) <= 1e-10);
  CHECK(std::fabs(moment_bruteforce(m33, 5).value) <= 1e-10);
  CHECK(moment_bruteforce(m33, 3).main_term == 0.0);
  CHECK(moment_bruteforce(m33, 4).main_term == doctest::Approx(3 * std::pow(4 * 6 * mu(m33.params()), 2)));
  CHECK_THROWS_AS(moment_bruteforce(m33, 7), std::invalid_argument);
  CHECK_THROWS_AS(moment_bruteforce(m33, 0), std::invalid_argument);
}

TEST_CASE("second moment by Fourier pairs matches enumeration away from balance") {
  for (auto [r, b, p] : {std::tuple{3u, 2u, 0.3}, {4u, 2u, 0.6}, {1u, 5u, 0.45}}) {
    const auto rep = moment_bruteforce(TinyModel(r, b, p), 2);
    CHECK(std::fabs(rep.value - *rep.fourier_value) <= 1e-10);
    CHECK(std::fabs(rep.value - *rep.var_two_r1) <= 1e-10);
  }
}

TEST_CASE("|R_1| distribution sums to one") {
  const auto h = red_count_distribution(TinyModel(3, 3, 0.3));
  double total = 0;
  for (double x : h) total += x;
  CHECK(std::fabs(total - 1.0) <= 1e-12);
  CHECK(h.size() == 7);
}
