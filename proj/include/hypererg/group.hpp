#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hypererg {

// Letter 2i is the i-th free generator, 2i+1 its inverse.
using Letter = std::uint8_t;

constexpr Letter inv(Letter x) { return static_cast<Letter>(x ^ 1u); }

// A freely reduced word; the empty word is the identity.
struct Word {
  std::vector<Letter> letters;

  Word() = default;
  explicit Word(std::vector<Letter> l) : letters(std::move(l)) {}
  Word(std::initializer_list<Letter> l) : letters(l) {}

  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }
  Letter operator[](std::size_t i) const { return letters[i]; }
  Letter back() const { return letters.back(); }
  auto begin() const { return letters.begin(); }
  auto end() const { return letters.end(); }

  bool operator==(const Word&) const = default;
};

// Shortlex order: length first, then letter codes.
bool operator<(const Word& a, const Word& b);

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept;
};

class Alphabet {
 public:
  explicit Alphabet(int rank);

  int rank() const { return rank_; }
  int size() const { return 2 * rank_; }

  // 'a','b',... for generators and 'A','B',... for their inverses.
  char symbol(Letter x) const;
  // Accepts "a", "A", "a^-1", "a⁻¹", separators " .*·", and "1" or "e" (rank < 5) for identity.
  std::vector<Letter> parse_letters(std::string_view text) const;
  Word parse(std::string_view text) const;
  std::string format(const Word& w) const;
  std::string format_letters(std::span<const Letter> w) const;
  bool contains(const Word& w) const;
  void check(const Word& w) const;

  bool operator==(const Alphabet&) const = default;

 private:
  int rank_;
};

Word reduce(std::span<const Letter> letters);
// Validates letters against the alphabet before reducing.
Word reduce(const Alphabet& alphabet, std::span<const Letter> letters);

// Concatenate and cancel at the junction; inputs must already be reduced.
Word mul(const Word& g, const Word& h);
Word multiply(const Alphabet& alphabet, const Word& g, const Word& h);
Word inverse(const Word& g);
bool is_reduced(std::span<const Letter> letters);

// Length of the longest common prefix.
std::size_t common_prefix(std::span<const Letter> a, std::span<const Letter> b);
bool has_prefix(const Word& w, const Word& p);
Word truncate(const Word& w, std::size_t n);

// Letters that may follow the last letter of w in a reduced word (all letters when w is empty).
std::vector<Letter> successors(const Word& w, int rank);

}  // namespace hypererg
