#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace manhattan {

/// Letter code 2g for generator g, 2g+1 for its inverse.  Code order gives the
/// symbol order a < A < b < B < c < C < d < D used by canonical forms.
using Letter = std::uint8_t;

constexpr Letter inverseLetter(Letter x) { return static_cast<Letter>(x ^ 1U); }
constexpr int generatorOf(Letter x) { return x >> 1; }
constexpr bool isInverse(Letter x) { return (x & 1U) != 0; }

/// A word over generators and formal inverses (not necessarily reduced).
struct Word {
  std::vector<Letter> letters;

  Word() = default;
  explicit Word(std::vector<Letter> l) : letters(std::move(l)) {}

  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }
  Letter operator[](std::size_t i) const { return letters[i]; }

  Word inverse() const;
  Word operator*(const Word& o) const;

  /// Length first, then lexicographic in letter-code order.
  friend std::strong_ordering operator<=>(const Word& x, const Word& y) {
    if (x.size() != y.size()) return x.size() <=> y.size();
    return x.letters <=> y.letters;
  }
  friend bool operator==(const Word&, const Word&) = default;
};

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept;
};

enum class PresentationMode { FreeRank2, GenusTwoSurface };

const char* toString(PresentationMode mode);
PresentationMode parsePresentationMode(std::string_view s);

/// A one-relator (or free) presentation.  In genus-2 mode the generators
/// a1, b1, a2, b2 are written a, b, c, d and the relator is abABcdCD.
class Presentation {
 public:
  static Presentation freeRank2();
  static Presentation genusTwo();
  static Presentation of(PresentationMode mode);

  PresentationMode mode() const { return mode_; }
  int rank() const { return rank_; }
  int letterCount() const { return 2 * rank_; }
  const Word& relator() const { return relator_; }
  bool hasRelator() const { return !relator_.empty(); }

  /// Successor of x along the cyclic relator (dir 0) or its inverse (dir 1).
  Letter relatorNext(int dir, Letter x) const { return next_[dir][x]; }
  /// Whether "x y" occurs in a cyclic rotation of relator^(+-1); returns the
  /// direction (0 or 1) or -1.
  int relatorStep(Letter x, Letter y) const;

  char symbol(Letter x) const;
  std::string str(const Word& w) const;
  /// Parses ASCII words; whitespace is ignored.  Throws ParseError.
  Word parse(std::string_view s) const;

  /// Maximal piece length found when validating the small-cancellation
  /// condition at construction (1 for the genus-2 relator).
  int maxPieceLength() const { return maxPiece_; }

 private:
  Presentation(PresentationMode mode, int rank, Word relator);

  PresentationMode mode_;
  int rank_;
  Word relator_;
  std::array<std::array<Letter, 8>, 2> next_{};
  int maxPiece_ = 0;
};

Word freeReduce(const Word& w);
/// Free reduction followed by removal of wrap-around cancellations; the result
/// is conjugate to the input.
Word cyclicReduce(const Word& w);
/// Dehn's algorithm: replaces subwords longer than half a relator rotation by
/// the shorter complement until none remain.  Same group element, never longer.
Word dehnReduce(const Word& w, const Presentation& p);
/// Cyclic version of dehnReduce; the result is conjugate to the input.
Word cyclicDehnReduce(const Word& w, const Presentation& p);

/// Canonical unoriented conjugacy-class representative.
struct ConjClass {
  Word canonical;
  int wordLength = 0;

  friend auto operator<=>(const ConjClass& x, const ConjClass& y) {
    return x.canonical <=> y.canonical;
  }
  friend bool operator==(const ConjClass& x, const ConjClass& y) {
    return x.canonical == y.canonical;
  }
};

/// Smallest word among all cyclic rotations of w and of its inverse.
Word minimalRotation(const Word& w);

/// Reduces w (free, cyclic, and in genus-2 mode cyclic Dehn reduction plus a
/// bounded closure under half-relator swaps) and returns the smallest
/// rotation/inversion.  Throws TrivialWord when w reduces to the empty word.
ConjClass canonicalClass(const Word& w, const Presentation& p);

/// True when the canonical cyclic word is not a proper power.
bool isPrimitive(const ConjClass& c);

/// Emits every class of canonical length <= maxWordLength exactly once, in
/// length-lexicographic order.
void enumerateClasses(const Presentation& p, int maxWordLength,
                      const std::function<void(const ConjClass&)>& emit);
std::vector<ConjClass> enumerateClasses(const Presentation& p, int maxWordLength);

/// Generator substitution g -> images[g]; inverses map to inverse images.
struct EndomorphismTable {
  std::vector<Word> images;

  static EndomorphismTable identity(const Presentation& p);
  /// (this o inner)(g) = this(inner(g)).
  EndomorphismTable after(const EndomorphismTable& inner) const;
  friend bool operator==(const EndomorphismTable&, const EndomorphismTable&) = default;
};

Word applyAutomorphism(const EndomorphismTable& table, const Word& w);

/// Dehn twist tau_curve^power as a generator table.  Supported curves: the
/// generators, and in genus-2 mode the separating curve abAB.  Throws
/// UnsupportedCurve otherwise.
EndomorphismTable twistAutomorphism(const Presentation& p, const ConjClass& curve, int power);

/// The curves accepted by twistAutomorphism, as canonical classes.
std::vector<ConjClass> supportedTwistCurves(const Presentation& p);

}  // namespace manhattan
