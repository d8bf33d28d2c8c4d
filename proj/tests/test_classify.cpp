#include "support.hpp"

#include "rwogg/classify.hpp"
#include "rwogg/descriptor.hpp"

#include <doctest.h>

using namespace rwogg;

namespace {

Verdict verdict(std::string_view fam, std::string_view sched) {
  return classify(parse_family(fam), parse_schedule(sched)).verdict;
}

constexpr auto R = Verdict::recurrent;
constexpr auto T = Verdict::transient;
constexpr auto U = Verdict::undecided;

} // namespace

TEST_CASE("series decision procedure") {
  CHECK(decide_series(1.5, 10, 10) == SeriesStatus::diverges);
  CHECK(decide_series(0.9, -10, -10) == SeriesStatus::converges);
  CHECK(decide_series(1, 2, 0) == SeriesStatus::converges);
  CHECK(decide_series(1, 0.5, 5) == SeriesStatus::diverges);
  CHECK(decide_series(1, 1, 1) == SeriesStatus::diverges);
  CHECK(decide_series(1, 1, 1.5) == SeriesStatus::converges);
  CHECK(decide_series(1, 1, 0) == SeriesStatus::diverges);
}

TEST_CASE("tree verdicts") {
  CHECK(verdict("karytree:k=2,lambda=1", "symbolic:base=2,a=1,b=1,d1=4") == R);
  CHECK(verdict("karytree:k=2,lambda=1", "symbolic:base=2,a=1,b=2,d1=4") == T);
  CHECK(verdict("karytree:k=2,lambda=2", "symbolic:base=1,a=0,b=0,d1=1") == R);
  CHECK(verdict("karytree:k=2,lambda=3", "symbolic:base=0.5,a=3,b=0,d1=1") == R);
  CHECK(verdict("heightpath:k=3,lambda=1", "symbolic:base=3,a=1,b=0,d1=1") == R);
  CHECK(verdict("karytree:k=3,lambda=1", "symbolic:base=3,a=1.5,b=0,d1=1") == T);
  // lambda/k = 1/2 against base 2: boundary on the log exponent.
  CHECK(verdict("karytree:k=4,lambda=2", "symbolic:base=2,a=1,b=1,d1=1") == R);
  CHECK(verdict("karytree:k=4,lambda=2", "symbolic:base=2,a=1,b=1.01,d1=1") == T);
}

TEST_CASE("box, cube and generalised box verdicts") {
  CHECK(verdict("box:d=4", "symbolic:base=1,a=-3,b=0,d1=1") == R);
  CHECK(verdict("box:d=4", "symbolic:base=1,a=-2.5,b=0,d1=1") == T);
  CHECK(verdict("box:d=3", "symbolic:base=1,a=-3,b=0,d1=1") == U);
  CHECK(verdict("box:d=5", "symbolic:base=1,a=0,b=0,d1=1,c=3") == T);
  CHECK(verdict("hypercube", "symbolic:base=2,a=1,b=0,d1=2") == R);
  CHECK(verdict("hypercube", "symbolic:base=2,a=1.5,b=0,d1=2") == T);
  CHECK(verdict("hypercube", "symbolic:base=2,a=0.5,b=0,d1=2") == R);
  CHECK(verdict("hypercube", "explicit:1,2,3") == U);
  CHECK(verdict("hamming", "symbolic:base=2,a=1,b=2,d1=2") == T);

  auto gap = classify(parse_family("genbox:b=n/n/n"), parse_schedule("symbolic:base=1,a=-1,b=0,d1=1"));
  CHECK(gap.verdict == U);
  CHECK(verdict("genbox:b=n/n/n", "symbolic:base=1,a=-2,b=0,d1=1") == R);
  CHECK(verdict("genbox:b=n/n/n/n/n", "symbolic:base=1,a=-4,b=0,d1=1") == R);
  CHECK(verdict("genbox:b=n/n/n/n/n", "symbolic:base=1,a=-3,b=0,d1=1") == T);
  CHECK(verdict("genbox:b=1/n", "symbolic:base=1,a=0,b=0,d1=2,c=2") == R);
  CHECK(verdict("genbox:b=1/1", "symbolic:base=1,a=0,b=0,d1=1") == U);
}

TEST_CASE("level tree and star verdicts") {
  CHECK(verdict("leveltree:profile=const:2,gamma=0", "symbolic:base=2,a=1,b=0,d1=2") == R);
  CHECK(verdict("leveltree:profile=const:2,gamma=0", "symbolic:base=2,a=2,b=0,d1=2") == U);
  CHECK(verdict("leveltree:profile=const:3,gamma=1/2", "symbolic:base=3,a=0.5,b=0,d1=2") == R);
  CHECK(verdict("leveltree:profile=const:3,gamma=1/2", "symbolic:base=3,a=2,b=0,d1=2") == U);
  CHECK(verdict("leveltree:profile=const:3,gamma=1/4", "symbolic:base=3,a=0,b=0,d1=2") == U);
  CHECK(verdict("leveltree:profile=table:2;2/1,gamma=0", "symbolic:base=3,a=0,b=0,d1=2") == U);
  CHECK(verdict("star:M=linear,gamma=0", "symbolic:base=1,a=0,b=0,d1=1") == R);
  CHECK(verdict("star:M=pow:2,gamma=0", "symbolic:base=1,a=0,b=0,d1=1") == T);
  CHECK(verdict("star:M=nlogn,gamma=1/2", "symbolic:base=1,a=0,b=0,d1=1") == R);
  CHECK(verdict("star:M=exp:2,gamma=1/3", "symbolic:base=1,a=0,b=0,d1=1") == T);
  CHECK(verdict("star:M=const:5,gamma=0", "symbolic:base=1,a=0,b=0,d1=1") == R);
  CHECK(verdict("star:M=linear,gamma=0", "symbolic:base=1,a=0,b=0,d1=2,c=2") == U);
}

TEST_CASE("two-sided criteria flip across the log boundary") {
  for (const char *fam : {"karytree:k=2,lambda=1", "hypercube"}) {
    for (double a : {0.9, 1.0, 1.1}) {
      for (double b : {0.5, 1.0, 1.5, 2.0}) {
        auto s = "symbolic:base=2,a=" + format_number(a) + ",b=" + format_number(b) + ",d1=2";
        auto v = verdict(fam, s);
        bool conv = a > 1 || (a == 1 && b > 1);
        CHECK(v == (conv ? T : R));
      }
    }
  }
}

TEST_CASE("one-sided criteria never claim transience") {
  for (double a : {-1.0, 0.0, 0.5, 1.0, 2.0, 5.0})
    for (double base : {1.0, 2.0, 3.0}) {
      auto s = "symbolic:base=" + format_number(base) + ",a=" + format_number(a) + ",b=0,d1=2";
      CHECK(verdict("leveltree:profile=const:2,gamma=0", s) != T);
      CHECK(verdict("leveltree:profile=const:2,gamma=3/4", s) != T);
    }
}

TEST_CASE("descriptors round-trip") {
  for (const char *s : {"karytree:k=2,lambda=1", "heightpath:k=3,lambda=0.5", "box:d=4", "genbox:b=1/n/2n/3+n",
                        "hypercube", "hamming", "leveltree:profile=const:3,gamma=0.5",
                        "leveltree:profile=table:1;2/1;2/1/3,gamma=0", "heightchain:profile=const:2,gamma=0",
                        "star:M=linear,gamma=0", "star:M=const:4,gamma=0.5", "star:M=pow:1.5,gamma=0",
                        "star:M=exp:2,gamma=0", "star:M=nlogn,gamma=0"}) {
    CAPTURE(s);
    auto f = parse_family(s);
    CHECK(format_family(f) == s);
  }
  for (const char *s : {"explicit:3,5,0,2", "symbolic:base=2,a=1,b=1,d1=4", "symbolic:base=2,a=-1,b=0,d1=4,c=2",
                        "symbolic:base=2,a=1,b=2,d1=1,round=ceil"}) {
    CAPTURE(s);
    CHECK(format_schedule(parse_schedule(s)) == s);
  }
  CHECK(parse_schedule("symbolic:base=2,a=1,b=1,d1=4").duration(4) == 3);
  CHECK(parse_schedule("symbolic:base=2, a=-1, b=0, d1=4, c=2").duration(3) == 48);
  auto lt = std::get<LevelTree>(parse_family("leveltree:profile=table:1;2/3,gamma=0"));
  CHECK(lt.profile.table == std::vector<std::vector<std::uint32_t>>{{1}, {2, 3}});
}

TEST_CASE("bad descriptors are config errors") {
  for (const char *s : {"", "tree:k=2", "karytree:k=2", "karytree:k=1,lambda=1", "karytree:k=2,lambda=x",
                        "box:d=0", "box:d=2,e=1", "star:M=weird,gamma=0", "star:M=linear,gamma=1",
                        "leveltree:profile=oops", "genbox:b=", "karytree:k=2,k=3,lambda=1"}) {
    CAPTURE(s);
    CHECK_THROWS_AS(parse_family(s), ConfigError);
  }
  for (const char *s : {"explicit:", "explicit:1,-2", "symbolic:a=1", "symbolic:base=0", "symbolic:base=2,x=1",
                        "geometric:2", "symbolic:base=2,round=up"}) {
    CAPTURE(s);
    CHECK_THROWS_AS(parse_schedule(s), ConfigError);
  }
}
