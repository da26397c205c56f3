#pragma once

// Cylinder words over the alphabet {0,2} and their Bernoulli branch masses.
//
// A word w addresses one cylinder C_w of the middle-third Cantor set: the
// letter 0 selects the left third, the letter 2 the right third.  The
// Bernoulli measure with left weight p gives C_w the mass
// p^(#zeros) * (1-p)^(#twos).

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cantor_frame {

constexpr int kMaxWordLength = 31;

// Branch weights of the Bernoulli measure: p on letter 0, 1-p on letter 2.
struct BranchWeights {
  double p;

  explicit BranchWeights(double p_) : p(p_) {
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("branch weight p must lie in (0,1)");
  }

  double one_minus_p() const { return 1.0 - p; }
  // Collision parameter: the two-step return weight p^2 + (1-p)^2.
  double q() const { return p * p + (1.0 - p) * (1.0 - p); }
  // Dominant branch mass; controls every tail estimate below.
  double alpha() const { return p > 1.0 - p ? p : 1.0 - p; }
};

// A word is stored as packed bits (0 -> letter 0, 1 -> letter 2) with the
// first letter in the most significant used position, so that the raw bit
// value is also the lexicographic rank (0 < 2) within a level.
class Word {
 public:
  Word() = default;

  static Word from_string(const std::string& s) {
    if (s == "-") return Word();
    Word w;
    for (char c : s) {
      if (c == '0')
        w = w.child(0);
      else if (c == '2')
        w = w.child(2);
      else
        throw std::invalid_argument("word letters must be 0 or 2");
    }
    return w;
  }

  int length() const { return len_; }
  bool empty() const { return len_ == 0; }

  // Letter at position i (0-based from the left); returns 0 or 2.
  int letter(int i) const {
    if (i < 0 || i >= len_) throw std::out_of_range("letter index");
    return ((bits_ >> (len_ - 1 - i)) & 1u) ? 2 : 0;
  }

  Word child(int letter) const {
    if (len_ >= kMaxWordLength) throw std::length_error("word too long");
    if (letter != 0 && letter != 2)
      throw std::invalid_argument("letter must be 0 or 2");
    Word w;
    w.bits_ = (bits_ << 1) | (letter == 2 ? 1u : 0u);
    w.len_ = len_ + 1;
    return w;
  }

  Word parent() const {
    if (len_ == 0) throw std::out_of_range("root has no parent");
    Word w;
    w.bits_ = bits_ >> 1;
    w.len_ = len_ - 1;
    return w;
  }

  // Number of letters equal to 2.
  int count_twos() const { return __builtin_popcount(bits_); }
  int count_zeros() const { return len_ - count_twos(); }

  // Rank within the level (lexicographic, 0 < 2).
  uint32_t lex_rank() const { return bits_; }

  // The empty word prints as "-".
  std::string str() const {
    if (len_ == 0) return "-";
    std::string s;
    s.reserve(len_);
    for (int i = 0; i < len_; ++i) s.push_back(letter(i) == 0 ? '0' : '2');
    return s;
  }

  bool operator==(const Word& o) const {
    return len_ == o.len_ && bits_ == o.bits_;
  }
  bool operator!=(const Word& o) const { return !(*this == o); }

  // Canonical enumeration order: by length, then lexicographically.
  bool operator<(const Word& o) const {
    return len_ != o.len_ ? len_ < o.len_ : bits_ < o.bits_;
  }

  bool is_prefix_of(const Word& o) const {
    return len_ <= o.len_ && (o.bits_ >> (o.len_ - len_)) == bits_;
  }

 private:
  uint32_t bits_ = 0;
  int len_ = 0;
};

enum class WordRelation {
  Equal,
  FirstPrefixOfSecond,   // u is a proper prefix of v: C_v sits inside C_u
  SecondPrefixOfFirst,   // v is a proper prefix of u
  Incomparable,          // disjoint cylinders
};

inline WordRelation relation(const Word& u, const Word& v) {
  if (u == v) return WordRelation::Equal;
  if (u.is_prefix_of(v)) return WordRelation::FirstPrefixOfSecond;
  if (v.is_prefix_of(u)) return WordRelation::SecondPrefixOfFirst;
  return WordRelation::Incomparable;
}

inline bool comparable(const Word& u, const Word& v) {
  return relation(u, v) != WordRelation::Incomparable;
}

// mu_p(C_w) = p^(#zeros) * (1-p)^(#twos).
inline double mass(const Word& w, const BranchWeights& bw) {
  double m = 1.0;
  for (int i = 0; i < w.length(); ++i)
    m *= (w.letter(i) == 0) ? bw.p : bw.one_minus_p();
  return m;
}

// Mass of the deepest shared ancestor cylinder, i.e. mu_p(C_u cap C_v);
// zero when the cylinders are disjoint.
inline double intersection_mass(const Word& u, const Word& v,
                                const BranchWeights& bw) {
  switch (relation(u, v)) {
    case WordRelation::Equal:
    case WordRelation::FirstPrefixOfSecond:
      return mass(v, bw);
    case WordRelation::SecondPrefixOfFirst:
      return mass(u, bw);
    default:
      return 0.0;
  }
}

// All words with length <= max_len in canonical order (length, then lex).
// The count is 2^(max_len+1) - 1.  Appending child(0), child(2) of parents
// already in lex order yields ranks 2r, 2r+1, which is again lex order.
inline std::vector<Word> enumerate_words(int max_len) {
  if (max_len < 0 || max_len > kMaxWordLength - 1)
    throw std::invalid_argument("enumerate_words: bad max_len");
  std::vector<Word> out;
  out.reserve((size_t(1) << (max_len + 1)) - 1);
  out.push_back(Word());
  size_t level_begin = 0;
  for (int len = 1; len <= max_len; ++len) {
    size_t level_end = out.size();
    for (size_t i = level_begin; i < level_end; ++i) {
      out.push_back(out[i].child(0));
      out.push_back(out[i].child(2));
    }
    level_begin = level_end;
  }
  return out;
}

// Index of w in the canonical enumeration: 2^len - 1 + lex rank.
inline size_t word_index(const Word& w) {
  return ((size_t(1) << w.length()) - 1) + w.lex_rank();
}

// All words of exactly the given length, in lex order.
inline std::vector<Word> level_words(int len) {
  if (len < 0 || len > kMaxWordLength - 1)
    throw std::invalid_argument("level_words: bad length");
  std::vector<Word> level{Word()};
  for (int l = 1; l <= len; ++l) {
    std::vector<Word> next;
    next.reserve(level.size() * 2);
    for (const Word& w : level) {
      next.push_back(w.child(0));
      next.push_back(w.child(2));
    }
    level = std::move(next);
  }
  return level;
}

// Sum of squared masses over the descendants of z exactly n levels below.
// The square of a child split sums to (p^2 + (1-p)^2) times the parent's
// squared mass, so the total telescopes to mass(z)^2 * q^n.
inline double descendant_square_sum(const Word& z, int n,
                                    const BranchWeights& bw) {
  if (n < 0) throw std::invalid_argument("descendant_square_sum: n < 0");
  double mz = mass(z, bw);
  double qn = 1.0;
  for (int i = 0; i < n; ++i) qn *= bw.q();
  return mz * mz * qn;
}

}  // namespace cantor_frame
