#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hypererg/group.hpp"

namespace hypererg {

// First-letter distribution and non-backtracking transition rows of a Markov ray generator.
struct MarkovKernel {
  int rank = 2;
  std::vector<double> initial;                  // size 2k
  std::vector<std::vector<double>> transition;  // [from][to], zero on to == inv(from)

  static MarkovKernel uniform(int rank);
  void validate() const;
};

// An infinite reduced word, queried through its finite prefixes.
class BoundaryPoint {
 public:
  BoundaryPoint();

  // preamble . period^inf; the concatenation must stay reduced.
  static BoundaryPoint periodic(const Alphabet& alphabet, Word preamble, Word period);
  // Parses "pre(per)", e.g. "a(b)" = a b b b ..., "(A)" = a^-1 a^-1 ...
  static BoundaryPoint parse(const Alphabet& alphabet, std::string_view text);
  // Letters drawn from the kernel by a counter-based generator keyed on seed.
  static BoundaryPoint markov(std::uint64_t seed, std::shared_ptr<const MarkovKernel> kernel);

  Word prefix(std::size_t n) const;
  // g . this
  BoundaryPoint translated(const Word& g) const;
  const Word& shift() const { return shift_; }

  bool same_to_depth(const BoundaryPoint& other, std::size_t depth) const;
  std::string describe(const Alphabet& alphabet, std::size_t digits = 12) const;

  struct Ray;

 private:
  BoundaryPoint(std::shared_ptr<const Ray> core, Word shift);
  std::shared_ptr<const Ray> core_;
  Word shift_;
};

// Representative ray inside a cylinder: w followed by its last letter repeated.
BoundaryPoint cylinder_point(const Alphabet& alphabet, const Word& w);

// Deterministic 64-bit mixing used for all seeded draws.
std::uint64_t splitmix64(std::uint64_t x);
double unit_draw(std::uint64_t seed, std::uint64_t counter);

}  // namespace hypererg
