#include <set>

#include "doctest.h"

#include "cpce/encoding.hpp"
#include "cpce/errors.hpp"
#include "oracles.hpp"

using namespace cpce;

namespace {

// C(m, 2) by counting, independent of pair_count.
std::size_t count_pairs(std::size_t m) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) ++c;
  return c;
}

bool commute_dense(const PauliString& a, const PauliString& b) {
  const oracle::Dense A = oracle::pauli(a.to_string()), B = oracle::pauli(b.to_string());
  const oracle::Dense ab = oracle::mul(A, B), ba = oracle::mul(B, A);
  for (std::size_t k = 0; k < ab.a.size(); ++k)
    if (std::abs(ab.a[k] - ba.a[k]) > 1e-14) return false;
  return true;
}

}  // namespace

TEST_CASE("eta register sizes") {
  CHECK(eta(5, 2) == 4);
  CHECK(eta(5, 3) == 3);
  CHECK(eta(10, 2) == 7);
  CHECK(3 * count_pairs(7) == 63);
  CHECK(count_pairs(10) == 45);
  CHECK(eta(2, 2) == 2);
  CHECK(eta(3, 2) == 2);
  CHECK(eta(4, 2) == 3);
  CHECK_THROWS(eta(5, 4));
  CHECK_THROWS(eta(1, 2));
}

TEST_CASE("eta is the smallest register that fits") {
  for (std::size_t n = 3; n <= 200; ++n) {
    const std::size_t e = eta(n, 2);
    CHECK(e * e >= count_pairs(n));
    CHECK(((e - 1) * (e - 1) < count_pairs(n) || e == 2));
  }
}

TEST_CASE("capacity law") {
  for (std::size_t n = 3; n <= 64; ++n) CHECK(count_pairs(n) <= 3 * count_pairs(eta(n, 2)));
}

TEST_CASE("pair indexing is a lexicographic bijection") {
  for (std::size_t n = 2; n <= 12; ++n) {
    const PairIndexing idx(n);
    CHECK(idx.size() == count_pairs(n));
    std::size_t r = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        CHECK(idx.index(i, j) == r);
        CHECK(idx.index(j, i) == r);
        CHECK(idx.pair(r) == std::pair{i, j});
        ++r;
      }
  }
  CHECK_THROWS(PairIndexing(4).index(2, 2));
}

TEST_CASE("c_family order and size") {
  const auto f2 = c_family(2);
  REQUIRE(f2.size() == 3);
  CHECK(f2[0].to_string() == "XX");
  CHECK(f2[1].to_string() == "YY");
  CHECK(f2[2].to_string() == "ZZ");

  const auto f3 = c_family(3);
  REQUIRE(f3.size() == 9);
  CHECK(f3[0].to_string() == "XXI");
  CHECK(f3[1].to_string() == "XIX");
  CHECK(f3[2].to_string() == "IXX");
  CHECK(f3[3].to_string() == "YYI");

  CHECK(c_family(4).size() == 18);
  CHECK_THROWS(c_family(1));
}

TEST_CASE("c_assignment") {
  const auto a5 = c_assignment(5);
  CHECK(a5.eta == 4);
  CHECK(a5.observables.size() == 10);
  const auto fam = c_family(4);
  for (std::size_t r = 0; r < 10; ++r) CHECK(a5.observables[r] == fam[r]);

  const auto a3 = c_assignment(3);
  CHECK(a3.eta == 2);
  REQUIRE(a3.observables.size() == 3);
  CHECK(a3.observables[2].to_string() == "ZZ");

  const auto a2 = c_assignment(2);
  CHECK(a2.eta == 2);
  REQUIRE(a2.observables.size() == 1);
  CHECK(a2.observables[0].to_string() == "XX");
}

TEST_CASE("assignments are injective, traceless and two-local") {
  for (std::size_t n = 2; n <= 30; ++n) {
    for (const auto& a : {c_assignment(n), e_family(n)}) {
      std::set<std::string> seen;
      for (const PauliString& p : a.observables) {
        CHECK(p.size() == a.eta);
        CHECK(p.weight() == 2);
        CHECK(p.is_traceless());
        seen.insert(p.to_string());
      }
      CHECK(seen.size() == count_pairs(n));
    }
  }
}

TEST_CASE("e_family placement") {
  CHECK(e_family(2).observables[0].to_string() == "XX");
  const auto e4 = e_family(4);
  CHECK(e4.observables[PairIndexing(4).index(1, 3)].to_string() == "IXIX");
  CHECK(e_family(5).observables.size() == 10);
}

TEST_CASE("e_family strings commute as dense matrices") {
  for (std::size_t n = 2; n <= 5; ++n) {
    const auto obs = e_family(n).observables;
    for (std::size_t a = 0; a < obs.size(); ++a)
      for (std::size_t b = a + 1; b < obs.size(); ++b) CHECK(commute_dense(obs[a], obs[b]));
  }
  // the C family is not mutually commuting: XX and YY on a shared qubit
  CHECK_FALSE(commute_dense(PauliString::parse("XXI"), PauliString::parse("IYY")));
}

TEST_CASE("assignment json") {
  const nlohmann::json j = to_json(c_assignment(3));
  REQUIRE(j.size() == 3);
  CHECK(j[1]["r"] == 1);
  CHECK(j[1]["i"] == 0);
  CHECK(j[1]["j"] == 2);
  CHECK(j[1]["letters"] == "YY");
}
