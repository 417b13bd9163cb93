#include "hypererg/group.hpp"

#include <algorithm>
#include <cctype>

#include "hypererg/errors.hpp"

namespace hypererg {

bool operator<(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a.letters < b.letters;
}

std::size_t WordHash::operator()(const Word& w) const noexcept {
  std::uint64_t h = 1469598103934665603ull ^ w.size();
  for (Letter x : w.letters) {
    h ^= x;
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}

Alphabet::Alphabet(int rank) : rank_(rank) {
  if (rank < 2) throw InputError("free group rank must be at least 2, got " + std::to_string(rank));
  if (rank > 26) throw InputError("free group rank must be at most 26, got " + std::to_string(rank));
}

char Alphabet::symbol(Letter x) const {
  const char base = (x & 1u) ? 'A' : 'a';
  return static_cast<char>(base + x / 2);
}

std::vector<Letter> Alphabet::parse_letters(std::string_view text) const {
  std::vector<Letter> out;
  const std::string trimmed = [&] {
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    return s;
  }();
  if (trimmed.empty() || trimmed == "1" || (trimmed == "e" && rank_ < 5)) return out;

  std::size_t i = 0;
  auto starts = [&](std::string_view tok) { return text.substr(i, tok.size()) == tok; };
  while (i < text.size()) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c) || c == '.' || c == '*') {
      ++i;
      continue;
    }
    if (starts("\xC2\xB7")) {  // middle dot
      i += 2;
      continue;
    }
    if (starts("1")) {
      ++i;
      continue;
    }
    Letter x;
    if (c >= 'a' && c < 'a' + rank_) {
      x = static_cast<Letter>(2 * (c - 'a'));
    } else if (c >= 'A' && c < 'A' + rank_) {
      x = static_cast<Letter>(2 * (c - 'A') + 1);
    } else {
      throw InputError("unknown letter symbol '" + std::string(1, static_cast<char>(c)) + "' for rank " +
                       std::to_string(rank_));
    }
    ++i;
    if (starts("\xE2\x81\xBB\xC2\xB9")) {  // superscript minus one
      x = inv(x);
      i += 5;
    } else if (starts("^-1")) {
      x = inv(x);
      i += 3;
    } else if (starts("^{-1}")) {
      x = inv(x);
      i += 5;
    }
    out.push_back(x);
  }
  return out;
}

Word Alphabet::parse(std::string_view text) const { return reduce(parse_letters(text)); }

std::string Alphabet::format(const Word& w) const {
  if (w.empty()) return "e";
  return format_letters(w.letters);
}

std::string Alphabet::format_letters(std::span<const Letter> w) const {
  std::string s;
  s.reserve(w.size());
  for (Letter x : w) s.push_back(symbol(x));
  return s;
}

bool Alphabet::contains(const Word& w) const {
  return std::all_of(w.begin(), w.end(), [&](Letter x) { return x < size(); });
}

void Alphabet::check(const Word& w) const {
  if (!contains(w)) throw InputError("word uses letters outside the rank-" + std::to_string(rank_) + " alphabet");
}

Word reduce(std::span<const Letter> letters) {
  std::vector<Letter> out;
  out.reserve(letters.size());
  for (Letter x : letters) {
    if (!out.empty() && out.back() == inv(x))
      out.pop_back();
    else
      out.push_back(x);
  }
  return Word(std::move(out));
}

Word reduce(const Alphabet& alphabet, std::span<const Letter> letters) {
  for (Letter x : letters)
    if (x >= alphabet.size()) throw InputError("letter code " + std::to_string(x) + " outside alphabet");
  return reduce(letters);
}

Word mul(const Word& g, const Word& h) {
  std::size_t k = 0;
  const std::size_t m = std::min(g.size(), h.size());
  while (k < m && g[g.size() - 1 - k] == inv(h[k])) ++k;
  std::vector<Letter> out;
  out.reserve(g.size() + h.size() - 2 * k);
  out.insert(out.end(), g.letters.begin(), g.letters.end() - static_cast<std::ptrdiff_t>(k));
  out.insert(out.end(), h.letters.begin() + static_cast<std::ptrdiff_t>(k), h.letters.end());
  return Word(std::move(out));
}

Word multiply(const Alphabet& alphabet, const Word& g, const Word& h) {
  alphabet.check(g);
  alphabet.check(h);
  return mul(reduce(g.letters), reduce(h.letters));
}

Word inverse(const Word& g) {
  std::vector<Letter> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = inv(g[g.size() - 1 - i]);
  return Word(std::move(out));
}

bool is_reduced(std::span<const Letter> letters) {
  for (std::size_t i = 1; i < letters.size(); ++i)
    if (letters[i] == inv(letters[i - 1])) return false;
  return true;
}

std::size_t common_prefix(std::span<const Letter> a, std::span<const Letter> b) {
  const std::size_t m = std::min(a.size(), b.size());
  std::size_t k = 0;
  while (k < m && a[k] == b[k]) ++k;
  return k;
}

bool has_prefix(const Word& w, const Word& p) {
  return p.size() <= w.size() && std::equal(p.begin(), p.end(), w.begin());
}

Word truncate(const Word& w, std::size_t n) {
  if (n >= w.size()) return w;
  return Word(std::vector<Letter>(w.letters.begin(), w.letters.begin() + static_cast<std::ptrdiff_t>(n)));
}

std::vector<Letter> successors(const Word& w, int rank) {
  std::vector<Letter> out;
  out.reserve(2 * rank);
  for (int x = 0; x < 2 * rank; ++x) {
    const auto l = static_cast<Letter>(x);
    if (!w.empty() && l == inv(w.back())) continue;
    out.push_back(l);
  }
  return out;
}

}  // namespace hypererg
