#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "hypererg/ball.hpp"
#include "hypererg/errors.hpp"
#include "hypererg/group.hpp"
#include "hypererg/metric.hpp"
#include "test_support.hpp"

using namespace hypererg;
using testing_support::Gen;

namespace {

// Stack reduction written independently of the library.
std::vector<Letter> stack_reduce(const std::vector<Letter>& in) {
  std::vector<Letter> st;
  for (Letter x : in) {
    if (!st.empty() && (st.back() ^ 1) == x)
      st.pop_back();
    else
      st.push_back(x);
  }
  return st;
}

// Every reduced word of length <= R, found by reducing all letter strings of length <= R.
std::set<std::vector<Letter>> brute_ball(int rank, int R) {
  std::set<std::vector<Letter>> out;
  std::vector<Letter> cur;
  std::function<void()> rec = [&] {
    out.insert(stack_reduce(cur));
    if (static_cast<int>(cur.size()) == R) return;
    for (int x = 0; x < 2 * rank; ++x) {
      cur.push_back(static_cast<Letter>(x));
      rec();
      cur.pop_back();
    }
  };
  rec();
  return out;
}

}  // namespace

TEST(Reduce, CancelsAdjacentInversePairs) {
  const Alphabet A(2);
  EXPECT_EQ(A.format(reduce(A, A.parse_letters("a a^-1 b"))), "b");
  EXPECT_EQ(A.format(reduce(A, A.parse_letters(""))), "e");
  EXPECT_EQ(A.format(reduce(A, A.parse_letters("a b b^-1 a"))), "aa");
  EXPECT_EQ(A.format(reduce(A, A.parse_letters("a b B A"))), "e");
}

TEST(Reduce, RejectsUnknownSymbols) {
  const Alphabet A(2);
  EXPECT_THROW(A.parse("ac"), InputError);
  EXPECT_THROW(A.parse("a?"), InputError);
}

TEST(Reduce, RankBelowTwoIsRejected) { EXPECT_THROW(Alphabet(1), InputError); }

TEST(Multiply, Examples) {
  const Alphabet A(2);
  EXPECT_EQ(A.format(multiply(A, A.parse("ab"), A.parse("BA"))), "e");
  EXPECT_EQ(A.format(multiply(A, A.parse("ab"), Word{})), "ab");
  // "b^-1 b" reduces to e before the product is formed.
  const Word h = reduce(A, A.parse_letters("B b"));
  EXPECT_EQ(A.format(multiply(A, A.parse("ab"), h)), "ab");
}

TEST(Multiply, AlphabetMismatchIsAnInputError) {
  const Alphabet A(2);
  const Word w{4};  // letter of rank 3
  EXPECT_THROW(multiply(A, A.parse("a"), w), InputError);
}

TEST(Properties, ReduceIsIdempotentAndAgreesWithStackReduction) {
  Gen gen(11);
  for (int i = 0; i < 2000; ++i) {
    const int rank = 2 + static_cast<int>(gen.below(2));
    const auto letters = gen.letters(rank, 14);
    const Word r = reduce(letters);
    EXPECT_TRUE(is_reduced(r.letters));
    EXPECT_EQ(reduce(r.letters), r);
    EXPECT_EQ(r.letters, stack_reduce(letters));
  }
}

TEST(Properties, MultiplyIsReductionOfConcatenation) {
  Gen gen(12);
  for (int i = 0; i < 2000; ++i) {
    const auto u = gen.letters(2, 10), v = gen.letters(2, 10);
    std::vector<Letter> uv = u;
    uv.insert(uv.end(), v.begin(), v.end());
    EXPECT_EQ(mul(reduce(u), reduce(v)), reduce(uv));
  }
}

TEST(Properties, GroupLaws) {
  Gen gen(13);
  for (int i = 0; i < 2000; ++i) {
    const Word g = gen.reduced_upto(3, 8), h = gen.reduced_upto(3, 8), k = gen.reduced_upto(3, 8);
    EXPECT_EQ(mul(mul(g, h), k), mul(g, mul(h, k)));
    EXPECT_TRUE(mul(g, inverse(g)).empty());
    EXPECT_EQ(inverse(inverse(g)), g);
    EXPECT_EQ(inverse(mul(g, h)), mul(inverse(h), inverse(g)));
  }
}

TEST(Format, RoundTrips) {
  Gen gen(14);
  const Alphabet A(3);
  for (int i = 0; i < 500; ++i) {
    const Word g = gen.reduced_upto(3, 9);
    EXPECT_EQ(A.parse(A.format(g)), g);
  }
  EXPECT_EQ(A.parse("a⁻¹"), A.parse("A"));
  EXPECT_EQ(A.parse("a^-1.b"), A.parse("Ab"));
}

TEST(Shortlex, OrdersByLengthThenLetters) {
  const Alphabet A(2);
  EXPECT_LT(A.parse("b"), A.parse("aa"));
  EXPECT_LT(A.parse("a"), A.parse("A"));
  EXPECT_LT(Word{}, A.parse("a"));
}

TEST(Ball, RadiusZeroIsTheIdentity) {
  const auto ball = enumerate_ball(Metric::word(2), 0);
  ASSERT_EQ(ball.elements.size(), 1u);
  EXPECT_TRUE(ball.elements[0].g.empty());
}

TEST(Ball, WordSphereCountsMatchBruteForce) {
  for (int rank : {2, 3}) {
    const int R = rank == 2 ? 7 : 5;
    const auto brute = brute_ball(rank, R);
    std::map<std::size_t, std::size_t> by_len;
    for (const auto& w : brute) ++by_len[w.size()];
    const auto ball = enumerate_ball(Metric::word(rank), R);
    ASSERT_EQ(ball.elements.size(), brute.size());
    for (const auto& e : ball.elements) EXPECT_TRUE(brute.count(e.g.letters));
    for (const auto& [len, count] : ball.sphere_counts) EXPECT_EQ(count, by_len[static_cast<std::size_t>(len)]);
  }
}

TEST(Ball, WordSphereCountsFollowTheClosedForm) {
  for (int rank : {2, 3}) {
    const auto ball = enumerate_ball(Metric::word(rank), 8);
    ASSERT_EQ(ball.sphere_counts.size(), 9u);
    EXPECT_EQ(ball.sphere_counts[0].second, 1u);
    for (int R = 1; R <= 8; ++R) {
      const double expect = 2.0 * rank * std::pow(2 * rank - 1, R - 1);
      EXPECT_EQ(static_cast<double>(ball.sphere_counts[R].second), expect) << "rank " << rank << " R " << R;
    }
  }
  const auto small = enumerate_ball(Metric::word(2), 3);
  std::vector<std::size_t> counts;
  for (const auto& sc : small.sphere_counts) counts.push_back(sc.second);
  EXPECT_EQ(counts, (std::vector<std::size_t>{1, 4, 12, 36}));
}

TEST(Ball, WeightedBallMatchesExhaustiveFilter) {
  const Metric m = Metric::weighted(2, {1.0, 2.0});
  const auto ball = enumerate_ball(m, 2.0);
  std::set<std::string> got;
  for (const auto& e : ball.elements) got.insert(m.alphabet().format(e.g));
  EXPECT_EQ(got, (std::set<std::string>{"e", "a", "A", "aa", "AA", "b", "B"}));
  // Oracle: filter the word ball of radius 2 by weighted length.
  std::size_t expect = 0;
  for (const auto& w : brute_ball(2, 2)) {
    double len = 0;
    for (Letter x : w) len += x < 2 ? 1.0 : 2.0;
    if (len <= 2.0) ++expect;
  }
  EXPECT_EQ(ball.elements.size(), expect);
}

TEST(Ball, SortedByLengthThenShortlex) {
  const auto ball = enumerate_ball(Metric::weighted(2, {1.0, 1.5}), 5.0);
  for (std::size_t i = 1; i < ball.elements.size(); ++i) {
    const auto& a = ball.elements[i - 1];
    const auto& b = ball.elements[i];
    EXPECT_TRUE(a.length < b.length - 1e-12 || (std::abs(a.length - b.length) < 1e-12 && a.g < b.g));
  }
}

TEST(Ball, Monotone) {
  Gen gen(15);
  const Metric m = Metric::weighted(2, {1.0, 1.5});
  for (int i = 0; i < 10; ++i) {
    const double r1 = gen.unit() * 5, r2 = r1 + gen.unit() * 2;
    const auto small = enumerate_ball(m, r1);
    const auto big = enumerate_ball(m, r2);
    for (const auto& e : small.elements) EXPECT_TRUE(big.contains(e.g));
  }
}

TEST(Ball, CapRaisesResourceError) {
  try {
    enumerate_ball(Metric::word(2), 20, 1000);
    FAIL() << "expected a resource error";
  } catch (const ResourceError& e) {
    EXPECT_NE(std::string(e.what()).find("1000"), std::string::npos);
  }
}
