"""Bricks over a sidelength lattice and the minimal-tilable-set machinery.

A d-dimensional brick is a tuple of d sidelengths drawn from one
distributive lattice: factored naturals under divisibility, or phrases
under implication.  Brick divisibility is componentwise.  The combine
of a non-void brick set in direction delta takes the meet of the
delta-th sides and the join of every other side; the binary case is
written cix.  Closing a proto-set under cix in every direction and
keeping the divisibility-minimal elements yields the finite set that
decides tilability: a box T admits a signed tiling by the proto-set
exactly when some minimal brick divides T.

Two closure backends produce identical results.  The pure-Python one
supports derivation tracing (needed to rebuild explicit tilings); the
packed-bit one encodes each brick as one row of a uint8 matrix where
meet is AND, join is OR and divisibility is bit subset, and runs the
pair loop vectorized.  Mid-closure pruning (dropping any brick another
brick divides) is on by default and does not change the minimal set,
because combines are monotone in each argument; pass prune=False to
cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
import re

import numpy as np

from . import dedekind
from .numlat import (
    FactoredNat,
    GuardExceeded,
    ParseError,
    divides_nat,
    gcd_nat,
    lcm_nat,
    parse_nat,
    render_nat,
)
from .dedekind import Phrase, parse_phrase, phrase_key, render_phrase

__all__ = [
    "Brick",
    "BrickAntichain",
    "BrickParseError",
    "DimensionMismatch",
    "GuardExceeded",
    "NAT_LATTICE",
    "PHRASE_LATTICE",
    "lattice_of",
    "brick",
    "brick_divides",
    "comb",
    "cix",
    "ext_dir",
    "ext_all",
    "minimal_elements",
    "minimal_set",
    "rank",
    "is_tilable",
    "parse_brick",
    "render_brick",
    "brick_sort_key",
]

# switch to the packed-bit backend above this many bricks
_BITS_THRESHOLD = 24


class BrickParseError(ValueError):
    """Malformed brick text."""


class DimensionMismatch(ValueError):
    """Bricks of different dimension or sidelength type were mixed."""


# ---------------------------------------------------------------------------
# sidelength lattices


class _NatLattice:
    """Naturals under divisibility: meet gcd, join lcm."""

    name = "nat"

    @staticmethod
    def meet(a, b):
        return gcd_nat(a, b)

    @staticmethod
    def join(a, b):
        return lcm_nat(a, b)

    @staticmethod
    def leq(a, b):
        return divides_nat(a, b)

    @staticmethod
    def sort_key(a):
        return a.value

    @staticmethod
    def render_side(a):
        return render_nat(a, style="auto")

    @staticmethod
    def make_codec(values):
        return _NatCodec(values)


class _PhraseLattice:
    """Phrases under implication: meet is product, join is sum."""

    name = "phrase"

    @staticmethod
    def meet(a, b):
        return dedekind.meet(a, b)

    @staticmethod
    def join(a, b):
        return dedekind.join(a, b)

    @staticmethod
    def leq(a, b):
        return dedekind.leq(a, b)

    @staticmethod
    def sort_key(a):
        return phrase_key(a)

    @staticmethod
    def render_side(a):
        return "(" + render_phrase(a) + ")"

    @staticmethod
    def make_codec(values):
        return _PhraseCodec(values)


NAT_LATTICE = _NatLattice()
PHRASE_LATTICE = _PhraseLattice()


def lattice_of(b: "Brick"):
    s = b.sides[0]
    if isinstance(s, FactoredNat):
        return NAT_LATTICE
    if isinstance(s, Phrase):
        return PHRASE_LATTICE
    raise TypeError(f"unsupported sidelength type {type(s).__name__}")


# ---------------------------------------------------------------------------
# bricks


@dataclass(frozen=True)
class Brick:
    """A box: d sidelengths from one lattice, all positions meaningful."""

    sides: tuple

    def __post_init__(self):
        if not self.sides:
            raise ValueError("bricks need at least one side")
        kind = type(self.sides[0])
        if not isinstance(self.sides[0], (FactoredNat, Phrase)):
            raise TypeError(f"unsupported sidelength type {kind.__name__}")
        if any(type(s) is not kind for s in self.sides):
            raise ValueError("sides must all come from one lattice")

    @property
    def dim(self) -> int:
        return len(self.sides)

    def __str__(self) -> str:
        return render_brick(self)

    def __repr__(self) -> str:
        return f"Brick({render_brick(self)!r})"


def brick(*sides) -> Brick:
    """Convenience constructor accepting ints, literals, or lattice values.
    String sides parse like brick text: nat literals, or (phrase)."""
    conv = []
    for s in sides:
        if isinstance(s, int):
            conv.append(parse_nat(str(s)))
        elif isinstance(s, str):
            conv.append(_parse_side(s))
        else:
            conv.append(s)
    return Brick(tuple(conv))


def brick_sort_key(b: Brick):
    lat = lattice_of(b)
    return tuple(lat.sort_key(s) for s in b.sides)


def _check_same_shape(bricks) -> int:
    dims = {b.dim for b in bricks}
    if len(dims) != 1:
        raise DimensionMismatch(f"mixed dimensions {sorted(dims)}")
    kinds = {lattice_of(b).name for b in bricks}
    if len(kinds) != 1:
        raise DimensionMismatch(f"mixed sidelength lattices {sorted(kinds)}")
    return dims.pop()


def brick_divides(a: Brick, b: Brick) -> bool:
    """Componentwise divisibility; the parallel-packing order."""
    _check_same_shape((a, b))
    lat = lattice_of(a)
    return all(lat.leq(x, y) for x, y in zip(a.sides, b.sides))


def comb(delta: int, bricks) -> Brick:
    """Combine a non-void brick collection in direction delta (1-based):
    meet of the delta-th sides, join of every other side."""
    bl = list(bricks)
    if not bl:
        raise ValueError("comb of an empty collection")
    d = _check_same_shape(bl)
    if not 1 <= delta <= d:
        raise ValueError(f"direction {delta} outside 1..{d}")
    lat = lattice_of(bl[0])
    out = list(bl[0].sides)
    for b in bl[1:]:
        for i, s in enumerate(b.sides):
            out[i] = lat.meet(out[i], s) if i == delta - 1 else lat.join(out[i], s)
    return Brick(tuple(out))


def cix(delta: int, a: Brick, b: Brick) -> Brick:
    """Binary combine.  Commutative, idempotent, associative in each
    direction, and the direction operators distribute over each other;
    absorption fails from dimension 3 up, so this is not a lattice."""
    return comb(delta, (a, b))


# ---------------------------------------------------------------------------
# packed-bit codecs: meet = AND, join = OR, divides = bit subset


class _NatCodec:
    """Thermometer bits per prime: exponent e encodes as e low ones, so
    min/max of exponents become AND/OR of codes."""

    def __init__(self, values):
        caps: dict[int, int] = {}
        for v in values:
            for p, e in v.factors:
                if caps.get(p, 0) < e:
                    caps[p] = e
        self.layout = []  # (prime, offset, cap)
        off = 0
        for p in sorted(caps):
            self.layout.append((p, off, caps[p]))
            off += caps[p]
        self.nbits = off
        self.nbytes = max(1, (off + 7) // 8)

    def encode(self, v: FactoredNat) -> bytes:
        acc = 0
        fd = dict(v.factors)
        for p, off, cap in self.layout:
            e = fd.get(p, 0)
            if e > cap:
                raise ValueError(f"exponent of {p} exceeds codec capacity")
            acc |= ((1 << e) - 1) << off
        return acc.to_bytes(self.nbytes, "little")

    def decode(self, raw: bytes) -> FactoredNat:
        acc = int.from_bytes(raw, "little")
        pairs = []
        for p, off, cap in self.layout:
            e = ((acc >> off) & ((1 << cap) - 1)).bit_count()
            if e:
                pairs.append((p, e))
        return FactoredNat(tuple(pairs))


class _PhraseCodec:
    """Truth table bits over the joint alphabet of the given phrases."""

    def __init__(self, values):
        self.n = max((l for v in values for w in v.words for l in w), default=1)
        self.nbytes = max(1, (1 << self.n) // 8)

    def encode(self, v: Phrase) -> bytes:
        return dedekind.phrase_tt(v, self.n).to_bytes(self.nbytes, "little")

    def decode(self, raw: bytes) -> Phrase:
        return dedekind.phrase_from_tt(int.from_bytes(raw, "little"), self.n)


class _BrickCodec:
    def __init__(self, lat, bricks):
        self.dim = bricks[0].dim
        sides = [s for b in bricks for s in b.sides]
        self.side_codec = lat.make_codec(sides)
        self.width = self.side_codec.nbytes * self.dim

    def encode(self, b: Brick) -> np.ndarray:
        raw = b"".join(self.side_codec.encode(s) for s in b.sides)
        return np.frombuffer(raw, dtype=np.uint8).copy()

    def decode(self, row: np.ndarray) -> Brick:
        nb = self.side_codec.nbytes
        raw = row.tobytes()
        return Brick(
            tuple(
                self.side_codec.decode(raw[i * nb : (i + 1) * nb])
                for i in range(self.dim)
            )
        )

    def coord_slice(self, delta: int) -> slice:
        nb = self.side_codec.nbytes
        return slice((delta - 1) * nb, delta * nb)


# ---------------------------------------------------------------------------
# closure backends

# cap on distinct bricks a single closure may generate; mostly relevant
# with prune=False, where intermediate sets are not antichains
_CLOSURE_CAP = 5_000_000


def _closure_py(delta, bricks, lat, prune, trace):
    """Worklist fixpoint under binary cix in one direction.

    Deterministic: iteration follows insertion order from canonically
    sorted input.  When trace is a dict, every newly generated brick is
    recorded as brick -> (delta, a, b).
    """
    start = sorted(set(bricks), key=brick_sort_key)
    alive: dict[Brick, None] = dict.fromkeys(start)
    seen = set(start)
    stack = list(start)
    while stack:
        a = stack.pop()
        if a not in alive:
            continue
        for b in list(alive):
            c = cix(delta, a, b)
            if c in seen:
                continue
            seen.add(c)
            if len(seen) > _CLOSURE_CAP:
                raise GuardExceeded("closure exceeded the size cap")
            if trace is not None:
                trace[c] = (delta, a, b)
            if prune:
                if any(brick_divides(s, c) for s in alive):
                    continue
                for s in [s for s in alive if brick_divides(c, s)]:
                    del alive[s]
            alive[c] = None
            stack.append(c)
    return list(alive)


def _closure_bits(delta, bricks, lat, prune):
    """Vectorized fixpoint: bricks are uint8 rows, one pass per frontier
    row pairs it against every live row with AND on the delta field and
    OR elsewhere; pruning is two subset tests against the live matrix."""
    start = sorted(set(bricks), key=brick_sort_key)
    codec = _BrickCodec(lat, start)
    width, msl = codec.width, codec.coord_slice(delta)

    cap = max(1024, 2 * len(start))
    buf = np.zeros((cap, width), dtype=np.uint8)
    alive = np.zeros(cap, dtype=bool)
    m = 0
    seen: set[bytes] = set()
    for b in start:
        row = codec.encode(b)
        key = row.tobytes()
        if key not in seen:
            seen.add(key)
            buf[m] = row
            alive[m] = True
            m += 1
    frontier = list(range(m))

    def add_row(row) -> int | None:
        nonlocal buf, alive, m, cap
        key = row.tobytes()
        if key in seen:
            return None
        seen.add(key)
        if len(seen) > _CLOSURE_CAP:
            raise GuardExceeded("closure exceeded the size cap")
        if prune:
            live = buf[:m]
            anded = live & row
            if ((anded == live).all(axis=1) & alive[:m]).any():
                return None  # some live brick divides the candidate
            dominated = (anded == row).all(axis=1) & alive[:m]
            if dominated.any():
                alive[:m][dominated] = False
        if m == cap:
            cap *= 2
            buf = np.resize(buf, (cap, width))
            alive = np.resize(alive, cap)
            alive[m:] = False
        buf[m] = row
        alive[m] = True
        m += 1
        return m - 1

    while frontier:
        fresh: list[int] = []
        for i in frontier:
            if not alive[i]:
                continue
            idx = np.flatnonzero(alive[:m])
            live = buf[idx]
            cand = live | buf[i]
            cand[:, msl] = live[:, msl] & buf[i, msl]
            for row in np.unique(cand, axis=0):
                j = add_row(row)
                if j is not None:
                    fresh.append(j)
        frontier = fresh

    return [codec.decode(buf[i]) for i in np.flatnonzero(alive[:m])]


def ext_dir(delta: int, bricks, prune: bool = True, trace: dict | None = None,
            backend: str = "auto"):
    """Close a proto-set under cix in one direction: exactly the combines
    of its non-void subsets (minus pruned non-minimal ones when prune is
    on).  Returns bricks in canonical order."""
    bl = list(bricks)
    if not bl:
        raise ValueError("ext_dir of an empty proto-set")
    d = _check_same_shape(bl)
    if not 1 <= delta <= d:
        raise ValueError(f"direction {delta} outside 1..{d}")
    lat = lattice_of(bl[0])
    use_bits = backend == "bits" or (
        backend == "auto" and trace is None and len(bl) >= _BITS_THRESHOLD
    )
    if backend not in ("auto", "py", "bits"):
        raise ValueError(f"unknown backend {backend!r}")
    if use_bits and trace is not None:
        raise ValueError("derivation tracing requires the py backend")
    if use_bits:
        out = _closure_bits(delta, bl, lat, prune)
    else:
        out = _closure_py(delta, bl, lat, prune, trace)
    return sorted(out, key=brick_sort_key)


def ext_all(bricks, prune: bool = True, trace: dict | None = None,
            backend: str = "auto", progress=None):
    """One ext_dir pass per direction, in order.  The direction operators
    commute and are idempotent, so a single sweep reaches the fixpoint."""
    bl = list(bricks)
    if not bl:
        raise ValueError("ext_all of an empty proto-set")
    d = _check_same_shape(bl)
    cur = bl
    for delta in range(1, d + 1):
        cur = ext_dir(delta, cur, prune=prune, trace=trace, backend=backend)
        if progress is not None:
            progress(f"direction {delta}/{d}: {len(cur)} bricks")
    return cur


# ---------------------------------------------------------------------------
# antichains, minimal sets, tilability


@dataclass(frozen=True)
class BrickAntichain:
    """Bricks pairwise incomparable under divisibility, canonical order."""

    bricks: tuple[Brick, ...]
    _index: frozenset = field(repr=False, compare=False, default=frozenset())

    @staticmethod
    def of(bricks) -> "BrickAntichain":
        bs = tuple(sorted(set(bricks), key=brick_sort_key))
        return BrickAntichain(bs, frozenset(bs))

    def __iter__(self):
        return iter(self.bricks)

    def __len__(self) -> int:
        return len(self.bricks)

    def __contains__(self, b: Brick) -> bool:
        return b in (self._index or self.bricks)

    def validate(self) -> None:
        """Raise if any two members are comparable (quadratic; vectorized
        when a packed codec is available and the set is large)."""
        bs = self.bricks
        if len(bs) <= 1:
            return
        if len(bs) > 200:
            lat = lattice_of(bs[0])
            codec = _BrickCodec(lat, list(bs))
            mat = np.stack([codec.encode(b) for b in bs])
            for i in range(len(bs)):
                sub = ((mat & mat[i]) == mat[i]).all(axis=1)
                if int(sub.sum()) > 1:  # beyond brick i itself
                    j = int(np.flatnonzero(sub)[0])
                    j = j if j != i else int(np.flatnonzero(sub)[1])
                    raise ValueError(f"not an antichain: {bs[i]} divides {bs[j]}")
            return
        for a in bs:
            for b in bs:
                if a is not b and brick_divides(a, b):
                    raise ValueError(f"not an antichain: {a} divides {b}")

    def find_divisor(self, target: Brick) -> Brick | None:
        for m in self.bricks:
            if brick_divides(m, target):
                return m
        return None


def minimal_elements(bricks) -> BrickAntichain:
    """The bricks of S no other brick of S strictly divides."""
    bl = sorted(set(bricks), key=brick_sort_key)
    if not bl:
        raise ValueError("minimal_elements of an empty set")
    _check_same_shape(bl)
    if len(bl) > 200:
        lat = lattice_of(bl[0])
        codec = _BrickCodec(lat, bl)
        mat = np.stack([codec.encode(b) for b in bl])
        keep = []
        for i in range(len(bl)):
            sub = ((mat & mat[i]) == mat).all(axis=1)
            if int(sub.sum()) == 1:
                keep.append(bl[i])
        return BrickAntichain.of(keep)
    keep = [
        b for b in bl
        if not any(a is not b and brick_divides(a, b) for a in bl)
    ]
    return BrickAntichain.of(keep)


def minimal_set(bricks, prune: bool = True, trace: dict | None = None,
                backend: str = "auto", progress=None) -> BrickAntichain:
    """The minimal tilable set M(P): divisibility-minimal elements of the
    full combine closure.  Finite, an antichain, and the complete
    tilability criterion for P."""
    closed = ext_all(bricks, prune=prune, trace=trace, backend=backend,
                     progress=progress)
    return minimal_elements(closed)


def rank(bricks) -> int:
    """|M(P)|: the number of minimal tilable bricks of the proto-set."""
    return len(minimal_set(bricks))


def is_tilable(target: Brick, minimal: BrickAntichain) -> bool:
    """Signed-tilability decision: some minimal brick divides the target."""
    if minimal.bricks:
        _check_same_shape((target,) + minimal.bricks)
    return minimal.find_divisor(target) is not None


# ---------------------------------------------------------------------------
# brick text


def render_brick(b: Brick) -> str:
    """Numeric sides in nat-literal form joined by x; symbolic sides are
    each parenthesized, e.g. 25x3 and (wx)x(w+x)."""
    lat = lattice_of(b)
    return "x".join(lat.render_side(s) for s in b.sides)


_SYM_BRICK_RE = re.compile(r"^\(([^()]*)\)(?:x\(([^()]*)\))*$")


def _parse_side(text: str):
    """One side in brick-text form: a nat literal or a (phrase)."""
    if text.startswith("("):
        if not (len(text) > 2 and text.endswith(")")
                and "(" not in text[1:-1] and ")" not in text[1:-1]):
            raise BrickParseError(f"malformed symbolic side: {text!r}")
        try:
            return dedekind.parse_phrase(text[1:-1])
        except dedekind.PhraseParseError as e:
            raise BrickParseError(str(e)) from None
    return parse_nat(text)


def parse_brick(text: str) -> Brick:
    """Parse brick text in either numeric or symbolic form."""
    if not text:
        raise BrickParseError("empty brick text")
    if "(" in text:
        if not _SYM_BRICK_RE.match(text):
            raise BrickParseError(f"malformed symbolic brick: {text!r}")
        parts = re.findall(r"\(([^()]*)\)", text)
        try:
            return Brick(tuple(parse_phrase(p) for p in parts))
        except dedekind.PhraseParseError as e:
            raise BrickParseError(str(e)) from None
    try:
        return Brick(tuple(parse_nat(p) for p in text.split("x")))
    except ParseError as e:
        raise BrickParseError(str(e)) from None
