"""The free distributive lattice on n generators, as phrases.

A phrase is a reduced sum of products of letters: an antichain of words
under inclusion, e.g. ``wx+wy+xy``.  Phrases on n letters ordered by
pointwise implication form the free distributive lattice L[n] minus its
two constants; its size is the Dedekind number of n in the convention
that starts 1, 4, 18, 166, 7579, 7828352.

Letters are plain ints >= 1.  Words are sorted tuples of letters.  A
Phrase stores its words in a fixed total order so equality, hashing and
rendering are canonical.  Rendering uses the names w, x, y, z while
every letter index is <= 4 and w1..wn beyond that.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
import re

from .numlat import FactoredNat, GuardExceeded, gcd_nat, lcm_nat

__all__ = [
    "Phrase",
    "PhraseParseError",
    "reduce_words",
    "phrase",
    "join",
    "meet",
    "leq",
    "dual",
    "is_pure_sum",
    "phrase_alphabet",
    "word_key",
    "phrase_key",
    "cmp_phrase",
    "render_phrase",
    "parse_phrase",
    "enumerate_lattice",
    "monotone_count_oracle",
    "eval_hom",
    "phrase_tt",
    "phrase_from_tt",
]

_COMPACT = {"w": 1, "x": 2, "y": 3, "z": 4}
_COMPACT_NAMES = "wxyz"


class PhraseParseError(ValueError):
    """Malformed phrase text."""


def word_key(w: tuple[int, ...]) -> tuple:
    """Total order on words: size first, then letter indices."""
    return (len(w), w)


@dataclass(frozen=True)
class Phrase:
    """An antichain of words, canonically ordered by word_key."""

    words: tuple[tuple[int, ...], ...]

    def __str__(self) -> str:
        return render_phrase(self)

    def __repr__(self) -> str:
        return f"Phrase({render_phrase(self)!r})"


def reduce_words(words) -> Phrase:
    """Reduce a word collection: dedupe, then drop any word that
    strictly contains another.  The result is the canonical antichain."""
    ws = {tuple(sorted(set(w))) for w in words}
    if not ws:
        raise ValueError("a phrase needs at least one word")
    if () in ws:
        raise ValueError("empty word")
    for w in ws:
        if w[0] < 1:
            raise ValueError(f"letters are 1-based, got {w}")
    sets = {w: frozenset(w) for w in ws}
    kept = []
    for w in ws:
        sw = sets[w]
        if not any(sets[v] < sw for v in ws if v != w):
            kept.append(w)
    return Phrase(tuple(sorted(kept, key=word_key)))


def phrase(*words) -> Phrase:
    """Convenience constructor: phrase((1,2),(3,)) -> wx+y."""
    return reduce_words(words)


def join(a: Phrase, b: Phrase) -> Phrase:
    """Least upper bound: union of the word sets, reduced."""
    return reduce_words(a.words + b.words)


def meet(a: Phrase, b: Phrase) -> Phrase:
    """Greatest lower bound: all pairwise word unions, reduced."""
    return reduce_words(u + v for u in a.words for v in b.words)


def leq(a: Phrase, b: Phrase) -> bool:
    """a <= b iff every word of a contains some word of b."""
    bsets = [frozenset(v) for v in b.words]
    return all(any(bs <= set(u) for bs in bsets) for u in a.words)


def dual(a: Phrase) -> Phrase:
    """Swap sums and products: the minimal transversals of a's words.

    An involution; self-dual phrases such as wx+wy+xy are fixed points.
    """
    trans: set[frozenset[int]] = {frozenset()}
    for w in a.words:
        grown = {t | {l} for t in trans for l in w}
        # absorption: keep inclusion-minimal transversals only
        trans = {t for t in grown if not any(u < t for u in grown)}
    return reduce_words(tuple(sorted(t)) for t in trans)


def is_pure_sum(a: Phrase) -> bool:
    """True when every word is a single letter."""
    return all(len(w) == 1 for w in a.words)


def phrase_alphabet(a: Phrase) -> frozenset[int]:
    return frozenset(l for w in a.words for l in w)


def phrase_key(a: Phrase) -> tuple:
    """Sort key realizing cmp_phrase: word count, then the word list."""
    return (len(a.words), tuple(word_key(w) for w in a.words))


def cmp_phrase(a: Phrase, b: Phrase) -> int:
    ka, kb = phrase_key(a), phrase_key(b)
    return (ka > kb) - (ka < kb)


# ---------------------------------------------------------------------------
# text form


def _letter_str(i: int, numbered: bool) -> str:
    if not numbered and 1 <= i <= 4:
        return _COMPACT_NAMES[i - 1]
    return f"w{i}"


def render_phrase(a: Phrase, n: int | None = None) -> str:
    """Canonical text: words joined by +, letters in index order.

    Compact letter names w,x,y,z apply while the alphabet stays within
    the first four letters; pass n > 4 to force the numbered form.
    """
    hi = max((l for w in a.words for l in w), default=1)
    numbered = (n or hi) > 4
    return "+".join("".join(_letter_str(l, numbered) for l in w) for w in a.words)


_TOKEN_RE = re.compile(r"w[0-9]+|[wxyz]")


def parse_phrase(text: str) -> Phrase:
    """Parse phrase text; both letter styles are accepted anywhere."""
    if not text:
        raise PhraseParseError("empty phrase text")
    words = []
    for part in text.split("+"):
        pos, letters = 0, []
        while pos < len(part):
            m = _TOKEN_RE.match(part, pos)
            if not m:
                raise PhraseParseError(f"bad letter at {part[pos:]!r} in {text!r}")
            tok = m.group(0)
            if len(tok) > 1:
                idx = int(tok[1:])
                if idx < 1:
                    raise PhraseParseError(f"letter index must be >= 1 in {text!r}")
            else:
                idx = _COMPACT[tok]
            letters.append(idx)
            pos = m.end()
        if not letters:
            raise PhraseParseError(f"empty word in {text!r}")
        words.append(tuple(letters))
    try:
        return reduce_words(words)
    except ValueError as e:
        raise PhraseParseError(str(e)) from None


# ---------------------------------------------------------------------------
# truth tables: bit v of the table is the value on the assignment whose
# true letters are the set bits of v.  Monotone functions only.


def phrase_tt(a: Phrase, n: int) -> int:
    """Truth table of a over letters 1..n as a 2**n bit int."""
    letter_tt = _letter_tables(n)
    out = 0
    for w in a.words:
        m = (1 << (1 << n)) - 1
        for l in w:
            if l > n:
                raise ValueError(f"letter {l} outside alphabet of size {n}")
            m &= letter_tt[l - 1]
        out |= m
    return out


@lru_cache(maxsize=None)
def _letter_tables(n: int) -> tuple[int, ...]:
    tabs = []
    for i in range(n):
        t = 0
        for v in range(1 << n):
            if v >> i & 1:
                t |= 1 << v
        tabs.append(t)
    return tuple(tabs)


def phrase_from_tt(tt: int, n: int) -> Phrase:
    """Inverse of phrase_tt: words are the minimal true assignments."""
    if tt <= 0:
        raise ValueError("constant-false table is not a phrase")
    words = []
    for v in range(1, 1 << n):
        if tt >> v & 1 and all(
            not (tt >> (v & ~(1 << i)) & 1) for i in range(n) if v >> i & 1
        ):
            words.append(tuple(i + 1 for i in range(n) if v >> i & 1))
    if tt & 1:
        raise ValueError("constant-true row: table is not generated by letters")
    return reduce_words(words)


# ---------------------------------------------------------------------------
# whole-lattice enumeration and the independent count


def enumerate_lattice(n: int) -> set[Phrase]:
    """All phrases on letters 1..n: the closure of the generators under
    join and meet.  Guard: 1 <= n <= 6 (n = 6 builds 7.8M phrases and
    needs several GB; sizes follow the Dedekind sequence)."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if n > 6:
        raise GuardExceeded(f"enumerate_lattice supports n <= 6, got {n}")
    # meet closure of the generators gives exactly the single-word phrases
    words = [tuple(c) for k in range(1, n + 1) for c in combinations(range(1, n + 1), k)]
    word_tts = {w: phrase_tt(Phrase((w,)), n) for w in words}
    # join closure: every phrase with k+1 words is (k-word phrase) | word,
    # so pairing the frontier against single words reaches everything
    seen: dict[int, Phrase] = {}
    for w, t in word_tts.items():
        seen[t] = Phrase((w,))
    frontier = list(seen.items())
    while frontier:
        fresh = []
        for t, p in frontier:
            for w, wt in word_tts.items():
                u = t | wt
                if u not in seen:
                    q = reduce_words(p.words + (w,))
                    seen[u] = q
                    fresh.append((u, q))
        frontier = fresh
    return set(seen.values())


def monotone_count_oracle(n: int) -> int:
    """Count phrases on n letters by brute force over all 2**(2**n)
    truth tables, testing monotonicity directly.  Guard: n <= 4."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if n > 4:
        raise GuardExceeded(f"monotone_count_oracle supports n <= 4, got {n}")
    size = 1 << n
    succ = [[v | (1 << i) for i in range(n) if not v >> i & 1] for v in range(size)]
    total = 0
    for tt in range(1 << size):
        ok = True
        for v in range(size):
            if tt >> v & 1:
                if any(not tt >> u & 1 for u in succ[v]):
                    ok = False
                    break
        if ok:
            total += 1
    return total - 2  # the two constants are not phrases


# ---------------------------------------------------------------------------
# evaluation


def eval_hom(a: Phrase, assign: dict[int, FactoredNat]) -> FactoredNat:
    """Evaluate a with + as lcm and product as gcd at the given letters.

    This is the lattice homomorphism L[n] -> (naturals, divisibility)
    fixed by the assignment; unassigned letters raise KeyError.
    """
    out: FactoredNat | None = None
    for w in a.words:
        cur: FactoredNat | None = None
        for l in w:
            v = assign[l]
            cur = v if cur is None else gcd_nat(cur, v)
        out = cur if out is None else lcm_nat(out, cur)
    assert out is not None
    return out
