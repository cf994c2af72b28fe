"""Symbolic minimal bricks of every dimension at once, and what they count.

Over the phrase lattice on n letters, a brick with infinitely many
coordinates, almost all equal to the pure sum of its alphabet (its
envelope), is stored as a finite prefix plus that envelope.  Combining
and divisibility restricted to any level d treat the tail as one extra
coordinate, so the engine closure applies unchanged.  The certificate
construction starts from the n letter cubes and repeatedly: extends
each brick by its envelope into the next coordinate, closes under the
binary combine in that coordinate, and keeps the divisibility-minimal
elements.  The construction stops at the first level whose minimal
bricks all leave the new coordinate enveloped; the top true dimension
reached is always n - 1 (a violation raises FactViolation, since the
counting below would be unsound).

Grouping the non-envelope sidelengths of a minimal brick gives its
archetype [e; a1^r1, ..., aK^rK].  Every coordinate arrangement of an
archetype is again minimal, and every minimal brick arises uniquely
this way, so the number of minimal bricks at level d is a sum of
multinomials: d! / (r1! ... rK! (d - tau)!) over the archetypes with
true dimension tau <= d.  Read as a function of d this is a polynomial
with rational coefficients over (n-1)!, the rank polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import json
import math
import os

from . import dedekind
from .dedekind import Phrase, phrase_key, render_phrase
from .engine import (
    Brick,
    BrickAntichain,
    GuardExceeded,
    brick_divides,
    cix,
    ext_dir,
    minimal_elements,
    parse_brick,
    render_brick,
)

__all__ = [
    "SymBrick",
    "Archetype",
    "Certificate",
    "FactViolation",
    "envelope_of",
    "is_balanced",
    "true_dim",
    "extend_brick",
    "rep_at_level",
    "symbrick_from_rep",
    "render_symbrick",
    "next_minimal_level",
    "certificate",
    "archetype_of",
    "render_archetype",
    "placement_count",
    "lattice_maxrank",
    "rank_polynomial",
    "render_polynomial",
    "check_fact_F4",
    "check_d2_bijection",
    "arch_count_table",
    "probe_disjoint_cix",
]


class FactViolation(RuntimeError):
    """A structural fact the counting relies on failed to hold."""


def _pure_sum(letters) -> Phrase:
    ls = sorted(set(letters))
    if not ls:
        raise ValueError("empty alphabet")
    return Phrase(tuple((l,) for l in ls))


@dataclass(frozen=True)
class SymBrick:
    """Envelope-tailed brick: finite prefix, then the envelope forever.

    Canonical form strips trailing envelope entries from the prefix, so
    equality compares bricks of different nominal levels correctly.
    """

    prefix: tuple[Phrase, ...]
    envelope: Phrase

    def __post_init__(self):
        if not dedekind.is_pure_sum(self.envelope):
            raise ValueError("envelope must be a pure sum")
        if self.prefix and self.prefix[-1] == self.envelope:
            raise ValueError("prefix not normalized: trailing envelope entry")

    def __str__(self) -> str:
        return render_symbrick(self, max(len(self.prefix), 1))


def symbrick(sides, envelope: Phrase | None = None) -> SymBrick:
    """Normalize: default envelope is the pure sum of the joint alphabet."""
    sides = tuple(sides)
    if envelope is None:
        letters = set()
        for s in sides:
            letters |= dedekind.phrase_alphabet(s)
        envelope = _pure_sum(letters)
    while sides and sides[-1] == envelope:
        sides = sides[:-1]
    return SymBrick(sides, envelope)


def envelope_of(b) -> Phrase:
    """Pure sum over the alphabet; accepts SymBrick, Brick or phrases."""
    if isinstance(b, SymBrick):
        return b.envelope
    sides = b.sides if isinstance(b, Brick) else tuple(b)
    letters = set()
    for s in sides:
        letters |= dedekind.phrase_alphabet(s)
    return _pure_sum(letters)


def is_balanced(b: SymBrick) -> bool:
    """Every prefix side uses the full alphabet of the brick."""
    alpha = dedekind.phrase_alphabet(b.envelope)
    return all(dedekind.phrase_alphabet(s) == alpha for s in b.prefix)


def true_dim(b: SymBrick) -> int:
    """Number of non-envelope sidelengths."""
    return sum(1 for s in b.prefix if s != b.envelope)


def extend_brick(b: Brick) -> Brick:
    """Append the envelope as one more coordinate."""
    return Brick(b.sides + (envelope_of(b),))


def rep_at_level(b: SymBrick, d: int) -> Brick:
    """b as a (d+1)-coordinate engine brick: prefix padded with envelope
    to d entries, then the envelope standing for the whole tail."""
    if len(b.prefix) > d:
        raise ValueError(f"prefix of length {len(b.prefix)} exceeds level {d}")
    pad = b.prefix + (b.envelope,) * (d - len(b.prefix))
    return Brick(pad + (b.envelope,))


def symbrick_from_rep(rep: Brick) -> SymBrick:
    """Inverse of rep_at_level; the last coordinate is the envelope."""
    env = rep.sides[-1]
    return symbrick(rep.sides[:-1], env)


def render_symbrick(b: SymBrick, d: int, n: int | None = None) -> str:
    """Brick text at level d: the padded prefix, envelope tail implied."""
    dd = max(d, 1)
    pad = b.prefix + (b.envelope,) * (dd - len(b.prefix))
    return "x".join("(" + render_phrase(s, n) + ")" for s in pad)


def _symbrick_from_text(text: str) -> SymBrick:
    return symbrick(parse_brick(text).sides)


def _symbrick_key(b: SymBrick):
    return (len(b.prefix), tuple(phrase_key(s) for s in b.prefix),
            phrase_key(b.envelope))


# ---------------------------------------------------------------------------
# the level construction


def next_minimal_level(prev, d: int, progress=None) -> tuple[SymBrick, ...]:
    """Minimal bricks at level d from those at level d-1: extend each by
    its envelope, close under the binary combine in coordinate d, keep
    the minimal elements."""
    reps = [rep_at_level(b, d) for b in prev]
    closed = ext_dir(d, reps, prune=True)
    mins = minimal_elements(closed)
    out = []
    for rep in mins:
        sb = symbrick_from_rep(rep)
        if not is_balanced(sb):
            raise FactViolation(f"unbalanced minimal brick at level {d}: {sb}")
        out.append(sb)
    if progress is not None:
        progress(f"level {d}: {len(out)} minimal bricks")
    return tuple(sorted(out, key=_symbrick_key))


@dataclass(frozen=True)
class Certificate:
    """All levels of the construction for one alphabet size."""

    n: int
    levels: tuple[tuple[SymBrick, ...], ...]  # index = dimension
    max_true_dim: int
    archetypes: tuple["Archetype", ...]

    def level_set(self, d: int) -> frozenset[SymBrick]:
        return frozenset(self.levels[d])


_CERT_CACHE: dict[int, Certificate] = {}


def certificate(n: int, allow_big: bool = False, checkpoint: str | None = None,
                progress=None) -> Certificate:
    """Run the construction for alphabet size n.

    Guard: n <= 4 by default; n = 5 is hours of work and must be let in
    with allow_big.  When checkpoint names a file, each finished level
    is appended to it as one JSON document per line and a partial file
    is picked up where it left off.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if n > 4 and not allow_big:
        raise GuardExceeded(
            f"certificate n={n} exceeds the default guard (n <= 4); "
            "pass allow_big (and a checkpoint path) to force"
        )
    if checkpoint is None and n in _CERT_CACHE:
        return _CERT_CACHE[n]

    levels: list[tuple[SymBrick, ...]] = []
    if checkpoint and os.path.exists(checkpoint):
        levels = _load_levels(checkpoint, n)
        if progress is not None and levels:
            progress(f"resumed {len(levels)} levels from {checkpoint}")
    if not levels:
        cubes = tuple(
            SymBrick((), _pure_sum([i])) for i in range(1, n + 1)
        )
        levels = [cubes]
        _write_level(checkpoint, n, 0, cubes)

    while True:
        d = len(levels)
        cur_max = max(true_dim(b) for b in levels[-1])
        if d > 1 and cur_max < d - 1:
            break  # the previous level already failed to use its last coordinate
        if d > n:
            raise FactViolation(
                f"construction for n={n} still growing at level {d}"
            )
        nxt = next_minimal_level(levels[-1], d, progress=progress)
        levels.append(nxt)
        _write_level(checkpoint, n, d, nxt)

    max_dim = max(true_dim(b) for level in levels for b in level)
    if max_dim != n - 1:
        raise FactViolation(
            f"top true dimension {max_dim} for n={n}, counting needs {n - 1}"
        )
    archetypes = _extract_archetypes(levels[-1])
    cert = Certificate(n, tuple(levels), max_dim, archetypes)
    if checkpoint:
        _write_summary(checkpoint, cert)
    _CERT_CACHE.setdefault(n, cert)
    return cert


def _write_level(path: str | None, n: int, d: int, bricks) -> None:
    if not path:
        return
    doc = {
        "n": n,
        "dimension": d,
        "max_true_dim": max(true_dim(b) for b in bricks),
        "bricks": [render_symbrick(b, d, n if n > 4 else None) for b in bricks],
    }
    with open(path, "a") as fh:
        fh.write(json.dumps(doc) + "\n")


def _write_summary(path: str, cert: Certificate) -> None:
    doc = {
        "n": cert.n,
        "complete": True,
        "max_true_dim": cert.max_true_dim,
        "levels": [len(l) for l in cert.levels],
        "archetypes": [render_archetype(a) for a in cert.archetypes],
    }
    with open(path, "a") as fh:
        fh.write(json.dumps(doc) + "\n")


def _load_levels(path: str, n: int) -> list[tuple[SymBrick, ...]]:
    levels: list[tuple[SymBrick, ...]] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            doc = json.loads(line)
            if doc.get("complete"):
                continue
            if doc.get("n") != n:
                raise ValueError(
                    f"checkpoint {path} is for n={doc.get('n')}, wanted {n}"
                )
            d = doc["dimension"]
            if d != len(levels):
                raise ValueError(f"checkpoint {path} has levels out of order")
            levels.append(tuple(
                _symbrick_from_text(t) for t in doc["bricks"]
            ))
    return levels


# ---------------------------------------------------------------------------
# archetypes and counting


@dataclass(frozen=True)
class Archetype:
    """Envelope plus the grouped non-envelope sidelengths [e; a1^r1,...]."""

    envelope: Phrase
    parts: tuple[tuple[Phrase, int], ...]  # ordered by phrase_key, counts >= 1

    @property
    def tau(self) -> int:
        return sum(r for _, r in self.parts)


def archetype_of(b: SymBrick) -> Archetype:
    """Group the non-envelope sides of b; arrangement-invariant."""
    if not is_balanced(b):
        raise ValueError(f"not a balanced brick: {b}")
    counts: dict[Phrase, int] = {}
    for s in b.prefix:
        if s != b.envelope:
            counts[s] = counts.get(s, 0) + 1
    parts = tuple(sorted(counts.items(), key=lambda kv: phrase_key(kv[0])))
    return Archetype(b.envelope, parts)


def render_archetype(a: Archetype, n: int | None = None) -> str:
    inner = ", ".join(
        f"({render_phrase(p, n)})^{r}" for p, r in a.parts
    )
    return f"[{render_phrase(a.envelope, n)}; {inner}]"


def _extract_archetypes(level) -> tuple[Archetype, ...]:
    seen: dict[Archetype, None] = {}
    for b in level:
        a = archetype_of(b)
        if a not in seen:
            seen[a] = None
    return tuple(sorted(
        seen,
        key=lambda a: (a.tau, phrase_key(a.envelope),
                       tuple((phrase_key(p), r) for p, r in a.parts)),
    ))


def placement_count(a: Archetype, d: int) -> int:
    """Arrangements of the archetype over d coordinates: the multinomial
    d! / (r1! ... rK! (d - tau)!), zero when d < tau."""
    if d < 0:
        raise ValueError(f"need d >= 0, got {d}")
    t = a.tau
    if d < t:
        return 0
    out = math.factorial(d) // math.factorial(d - t)
    for _, r in a.parts:
        out //= math.factorial(r)
    return out


def lattice_maxrank(n: int, d: int, allow_big: bool = False) -> int:
    """Minimal bricks at level d, counted through archetypes.  Extends
    the geometric table to every d >= 0, including d = 0 (the n cubes)
    and d = 1 (all 2**n - 1 sub-alphabet words)."""
    cert = certificate(n, allow_big=allow_big)
    return sum(placement_count(a, d) for a in cert.archetypes)


def rank_polynomial(n: int, allow_big: bool = False) -> tuple[Fraction, ...]:
    """Coefficients c0..c(n-1) with lattice_maxrank(n, d) = sum ci d**i
    for all d >= n - 1; denominators divide (n-1)!."""
    cert = certificate(n, allow_big=allow_big)
    coeffs = [Fraction(0)] * max(n, 1)
    for a in cert.archetypes:
        t = a.tau
        q = math.factorial(t)
        for _, r in a.parts:
            q //= math.factorial(r)
        # q * C(d, t) expanded: q / t! * d (d-1) ... (d-t+1)
        poly = [Fraction(q, math.factorial(t))]
        for i in range(t):
            # multiply by (d - i)
            poly = [Fraction(0)] + poly
            for j in range(len(poly) - 1):
                poly[j] -= i * poly[j + 1]
        for i, c in enumerate(poly):
            coeffs[i] += c
    return tuple(coeffs)


def render_polynomial(coeffs) -> str:
    """Exact text like 3 + 1/2*(d + 7*d^2): integer constant, then the
    higher terms over the common factorial denominator."""
    n = len(coeffs)
    const = coeffs[0]
    assert const.denominator == 1
    if n == 1:
        return str(const)
    denom = math.factorial(n - 1)
    terms = []
    for i in range(1, n):
        c = coeffs[i] * denom
        assert c.denominator == 1, "denominator exceeds (n-1)!"
        c = c.numerator
        if c == 0:
            continue
        var = "d" if i == 1 else f"d^{i}"
        if c == 1:
            terms.append(var)
        elif c == -1:
            terms.append(f"-{var}")
        else:
            terms.append(f"{c}*{var}")
    if not terms:
        return str(const)
    body = " + ".join(terms).replace("+ -", "- ")
    if denom == 1:
        return f"{const} + {body}" if len(terms) == 1 else f"{const} + ({body})"
    return f"{const} + 1/{denom}*({body})"


# ---------------------------------------------------------------------------
# structural checks


def check_fact_F4(n: int, allow_big: bool = False) -> bool:
    """The nested brick (..((w1 cix_1 w2) cix_2 w3) ..) cix_(n-1) wn is
    minimal with true dimension n - 1."""
    if n == 1:
        return true_dim(SymBrick((), _pure_sum([1]))) == 0
    cur = SymBrick((), _pure_sum([1]))
    for k in range(2, n + 1):
        lvl = k - 1
        a = rep_at_level(cur, lvl)
        b = rep_at_level(SymBrick((), _pure_sum([k])), lvl)
        cur = symbrick_from_rep(cix(lvl, a, b))
    if true_dim(cur) != n - 1:
        return False
    cert = certificate(n, allow_big=allow_big)
    return cur in cert.level_set(len(cert.levels) - 1)


def check_d2_bijection(n: int, allow_big: bool = False) -> bool:
    """alpha -> alpha x dual(alpha) maps the whole phrase lattice onto
    the minimal bricks at level 2, one to one."""
    cert = certificate(n, allow_big=allow_big)
    lattice = dedekind.enumerate_lattice(n)
    image = {
        symbrick((alpha, dedekind.dual(alpha))) for alpha in lattice
    }
    level = min(2, len(cert.levels) - 1)  # n = 1 stops below level 2
    return len(image) == len(lattice) and image == cert.level_set(level)


def arch_count_table(n: int, allow_big: bool = False) -> list[int]:
    """Archetype counts by true dimension 0..n-1."""
    cert = certificate(n, allow_big=allow_big)
    out = [0] * n
    for a in cert.archetypes:
        out[a.tau] += 1
    return out


def probe_disjoint_cix(b: SymBrick, c: SymBrick,
                       allow_big: bool = False) -> tuple[SymBrick, bool]:
    """Experimental: combine two minimal bricks after relabeling their
    alphabets apart, and report whether the result is minimal over the
    joint alphabet.  Returns (combined brick, minimality observed)."""
    nb = max(dedekind.phrase_alphabet(b.envelope))
    shifted = _shift_letters(c, nb)
    n = nb + max(dedekind.phrase_alphabet(c.envelope))
    lvl = max(len(b.prefix), len(shifted.prefix)) + 1
    combined = symbrick_from_rep(
        cix(lvl, rep_at_level(b, lvl), rep_at_level(shifted, lvl))
    )
    cert = certificate(n, allow_big=allow_big)
    d = len(cert.levels) - 1
    if len(combined.prefix) <= d:
        found = combined in cert.level_set(d)
    else:
        found = False
    return combined, found


def _shift_letters(b: SymBrick, offset: int) -> SymBrick:
    def shift(p: Phrase) -> Phrase:
        return Phrase(tuple(
            tuple(l + offset for l in w) for w in p.words
        ))

    return SymBrick(tuple(shift(s) for s in b.prefix), shift(b.envelope))
