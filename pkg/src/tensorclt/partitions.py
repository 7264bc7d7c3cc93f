"""Set partitions and pair partitions of ``{1, ..., p}``.

Partitions are stored in canonical form: every block is an ascending tuple
and blocks are ordered by their minimum.  Crossings follow the usual
four-point rule: blocks ``V`` and ``W`` cross when there are
``i < k < j < l`` with ``i, j`` in ``V`` and ``k, l`` in ``W``.

The module offers plain streaming enumerators, graph-based statistics
(crossing blocks, connected components, bipartiteness of the crossing graph),
the noncrossing closure decomposition, and a pruned incremental enumerator
that tabulates bipartite pairings by ``(components, crossing blocks)``.
"""

from __future__ import annotations

import threading
from collections import Counter, deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from tensorclt.errors import CapExceededError, DomainError

PAIR_CAP = 16
SET_CAP = 12
NONCROSSING_CAP = 14

Block = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class Partition:
    """A partition of ``{1, ..., p}`` in canonical form.

    Build instances with :meth:`from_blocks` (which canonicalises) or
    :meth:`parse`; the raw constructor only accepts canonical input.
    """

    p: int
    blocks: tuple[Block, ...]

    def __post_init__(self):
        if self.p < 0:
            raise DomainError(f"ground set size must be >= 0, got {self.p}")
        seen: list[int] = []
        for block in self.blocks:
            if not block:
                raise DomainError("empty block")
            if list(block) != sorted(set(block)):
                raise DomainError(f"block {block} is not strictly ascending")
            seen.extend(block)
        if sorted(seen) != list(range(1, self.p + 1)):
            raise DomainError(f"blocks {self.blocks} do not partition 1..{self.p}")
        mins = [b[0] for b in self.blocks]
        if mins != sorted(mins):
            raise DomainError("blocks are not ordered by their minimum")

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], p: int | None = None):
        canon = sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0] if b else 0)
        if p is None:
            p = sum(len(b) for b in canon)
        return cls(p, tuple(canon))

    @classmethod
    def parse(cls, text: str):
        """Parse ``"1,3|2,4"`` style text (1-based, whitespace ignored)."""
        text = "".join(text.split())
        if not text:
            return cls(0, ())
        blocks = []
        for chunk in text.split("|"):
            try:
                blocks.append([int(tok) for tok in chunk.split(",")])
            except ValueError:
                raise DomainError(f"cannot parse block {chunk!r}") from None
        for b in blocks:
            if len(set(b)) != len(b):
                raise DomainError(f"duplicate element in block {b}")
        return cls.from_blocks(blocks)

    @classmethod
    def _trusted(cls, p: int, blocks: tuple[Block, ...]):
        # Skips validation; callers guarantee canonical form.
        obj = object.__new__(cls)
        object.__setattr__(obj, "p", p)
        object.__setattr__(obj, "blocks", blocks)
        return obj

    def __eq__(self, other):
        # PairPartition and Partition with the same blocks are the same partition.
        if not isinstance(other, Partition):
            return NotImplemented
        return self.p == other.p and self.blocks == other.blocks

    def __hash__(self):
        return hash((self.p, self.blocks))

    def __len__(self) -> int:
        return len(self.blocks)

    def __str__(self) -> str:
        return "|".join(",".join(map(str, b)) for b in self.blocks)

    @property
    def is_pairing(self) -> bool:
        return all(len(b) == 2 for b in self.blocks)

    def block_of(self) -> list[int]:
        """Return ``labels`` with ``labels[x - 1]`` the block index of ``x``."""
        labels = [0] * self.p
        for idx, block in enumerate(self.blocks):
            for x in block:
                labels[x - 1] = idx
        return labels

    def rotate(self, shift: int = 1) -> "Partition":
        """Cyclically relabel ``x -> x + shift (mod p)``."""
        if self.p == 0:
            return self
        return type(self).from_blocks(
            [[(x - 1 + shift) % self.p + 1 for x in b] for b in self.blocks], self.p
        )


class PairPartition(Partition):
    """A partition whose blocks all have exactly two elements."""

    def __post_init__(self):
        super().__post_init__()
        if not self.is_pairing:
            raise DomainError(f"{self} is not a pair partition")


def as_pairing(pi: Partition) -> PairPartition:
    if isinstance(pi, PairPartition):
        return pi
    return PairPartition(pi.p, pi.blocks)


def _check_even(p: int) -> None:
    if p < 0 or p % 2:
        raise DomainError(f"pair partitions need an even, non-negative p, got {p}")


def _check_cap(p: int, cap: int, what: str) -> None:
    if p > cap:
        raise CapExceededError(f"{what} of p={p} exceeds the configured cap {cap}")


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def _pairings(points: tuple[int, ...]) -> Iterator[tuple[Block, ...]]:
    if not points:
        yield ()
        return
    a = points[0]
    for idx in range(1, len(points)):
        rest = points[1:idx] + points[idx + 1 :]
        head = ((a, points[idx]),)
        for tail in _pairings(rest):
            yield head + tail


def enumerate_pair_partitions(
    p: int, cap: int = PAIR_CAP, first_partner: int | None = None
) -> Iterator[PairPartition]:
    """Yield the ``(p-1)!!`` pair partitions of ``[p]``.

    Element 1 is paired with each possible partner in increasing order and the
    remainder is handled recursively.  ``first_partner`` restricts the stream
    to the chunk where 1 is paired with that element, so the chunks can be
    consumed independently.
    """
    _check_even(p)
    _check_cap(p, cap, "pair-partition enumeration")
    if p == 0:
        yield PairPartition._trusted(0, ())
        return
    partners = range(2, p + 1) if first_partner is None else (first_partner,)
    for b in partners:
        if not 2 <= b <= p:
            raise DomainError(f"first partner {b} outside 2..{p}")
        rest = tuple(x for x in range(2, p + 1) if x != b)
        for tail in _pairings(rest):
            yield PairPartition._trusted(p, ((1, b),) + tail)


def enumerate_set_partitions(
    p: int, min_block_size: int = 1, cap: int = SET_CAP
) -> Iterator[Partition]:
    """Yield every partition of ``[p]`` whose blocks have at least ``min_block_size`` elements."""
    if p < 0:
        raise DomainError(f"p must be >= 0, got {p}")
    _check_cap(p, cap, "set-partition enumeration")
    m = max(min_block_size, 1)
    blocks: list[list[int]] = []

    def deficit() -> int:
        return sum(max(0, m - len(b)) for b in blocks)

    def rec(x: int) -> Iterator[Partition]:
        remaining = p - x + 1
        if deficit() > remaining:
            return
        if x > p:
            yield Partition._trusted(p, tuple(tuple(b) for b in blocks))
            return
        for b in blocks:
            b.append(x)
            yield from rec(x + 1)
            b.pop()
        blocks.append([x])
        yield from rec(x + 1)
        blocks.pop()

    yield from rec(1)


def _noncrossing(points: tuple[int, ...]) -> Iterator[tuple[Block, ...]]:
    if not points:
        yield ()
        return
    first = points[0]

    # Extend the block of ``first``: ``chain`` holds the chosen elements,
    # ``gaps`` the index ranges strictly between consecutive ones.
    def grow(chain: list[int], last: int) -> Iterator[tuple[Block, ...]]:
        # close the block here: points after ``last`` form one outer region
        inner = _gap_products(chain, points)
        for fill in inner:
            yield (tuple(points[i] for i in chain),) + fill
        for nxt in range(last + 1, len(points)):
            chain.append(nxt)
            yield from grow(chain, nxt)
            chain.pop()

    yield from _sorted_blocks(grow([0], 0))


def _gap_products(chain: list[int], points: tuple[int, ...]) -> Iterator[tuple[Block, ...]]:
    bounds = chain + [len(points)]
    regions = [points[bounds[i] + 1 : bounds[i + 1]] for i in range(len(chain))]

    def rec(i: int) -> Iterator[tuple[Block, ...]]:
        if i == len(regions):
            yield ()
            return
        for part in _noncrossing(regions[i]):
            for rest in rec(i + 1):
                yield part + rest

    yield from rec(0)


def _sorted_blocks(stream: Iterator[tuple[Block, ...]]) -> Iterator[tuple[Block, ...]]:
    for blocks in stream:
        yield tuple(sorted(blocks))


def enumerate_noncrossing_partitions(p: int, cap: int = NONCROSSING_CAP) -> Iterator[Partition]:
    """Yield the ``C_p`` noncrossing partitions of ``[p]`` directly (no filtering)."""
    if p < 0:
        raise DomainError(f"p must be >= 0, got {p}")
    _check_cap(p, cap, "noncrossing enumeration")
    for blocks in _noncrossing(tuple(range(1, p + 1))):
        yield Partition._trusted(p, blocks)


# ---------------------------------------------------------------------------
# crossings and the intersection graph
# ---------------------------------------------------------------------------


def blocks_cross(u: Sequence[int], v: Sequence[int]) -> bool:
    """Four-point crossing test for two disjoint sorted blocks."""
    if len(u) < 2 or len(v) < 2:
        return False
    if len(u) == 2 and len(v) == 2:
        a, b = u
        c, d = v
        return a < c < b < d or c < a < d < b
    # Merge the two blocks and count runs of equal origin; ABAB needs >= 4 runs.
    i = j = 0
    runs = 0
    last = None
    while i < len(u) or j < len(v):
        if j == len(v) or (i < len(u) and u[i] < v[j]):
            origin, i = 0, i + 1
        else:
            origin, j = 1, j + 1
        if origin != last:
            runs += 1
            last = origin
            if runs >= 4:
                return True
    return False


@dataclass(frozen=True)
class IntersectionGraph:
    """Crossing graph on the blocks of a partition (vertices are block indices)."""

    size: int
    adjacency: tuple[frozenset[int], ...]

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.size) for j in self.adjacency[i] if i < j]

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    def components(self) -> list[list[int]]:
        """Connected components by breadth-first search, ordered by smallest vertex."""
        seen = [False] * self.size
        out = []
        for start in range(self.size):
            if seen[start]:
                continue
            seen[start] = True
            comp = [start]
            queue = deque([start])
            while queue:
                v = queue.popleft()
                for w in self.adjacency[v]:
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                        queue.append(w)
            out.append(sorted(comp))
        return out

    def two_coloring(self) -> list[int] | None:
        """A proper 2-coloring, or ``None`` when the graph has an odd cycle."""
        color = [-1] * self.size
        for start in range(self.size):
            if color[start] >= 0:
                continue
            color[start] = 0
            queue = deque([start])
            while queue:
                v = queue.popleft()
                for w in self.adjacency[v]:
                    if color[w] < 0:
                        color[w] = 1 - color[v]
                        queue.append(w)
                    elif color[w] == color[v]:
                        return None
        return color


def intersection_graph(pi: Partition) -> IntersectionGraph:
    k = len(pi.blocks)
    adj: list[set[int]] = [set() for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            if blocks_cross(pi.blocks[i], pi.blocks[j]):
                adj[i].add(j)
                adj[j].add(i)
    return IntersectionGraph(k, tuple(frozenset(a) for a in adj))


@dataclass(frozen=True)
class PartitionStats:
    num_blocks: int
    cr: int
    ncr: int
    cc: int


def stats(pi: Partition) -> PartitionStats:
    g = intersection_graph(pi)
    cr = sum(1 for i in range(g.size) if g.adjacency[i])
    return PartitionStats(num_blocks=g.size, cr=cr, ncr=g.size - cr, cc=len(g.components()))


def is_noncrossing(pi: Partition) -> bool:
    blocks = pi.blocks
    return not any(
        blocks_cross(blocks[i], blocks[j])
        for i in range(len(blocks))
        for j in range(i + 1, len(blocks))
    )


def is_connected(pi: Partition) -> bool:
    """Crossing graph connected and spanning the whole ground set."""
    if pi.p == 0:
        return False
    g = intersection_graph(pi)
    spans = min(b[0] for b in pi.blocks) == 1 and max(b[-1] for b in pi.blocks) == pi.p
    return spans and len(g.components()) == 1


def is_connected_by_intervals(pi: Partition) -> bool:
    """Connectedness read literally: no proper subinterval of ``[p]`` is a union of blocks.

    Deliberately independent of the crossing graph; used to cross-check
    :func:`is_connected`.
    """
    p = pi.p
    if p == 0:
        return False
    lo = [0] * (p + 1)
    hi = [0] * (p + 1)
    for b in pi.blocks:
        for x in b:
            lo[x], hi[x] = b[0], b[-1]
    for i in range(1, p + 1):
        reach_lo, reach_hi = p + 1, 0
        for j in range(i, p + 1):
            reach_lo = min(reach_lo, lo[j])
            reach_hi = max(reach_hi, hi[j])
            if (i, j) != (1, p) and reach_lo >= i and reach_hi <= j:
                return False
    return True


def is_bipartite(pi: Partition) -> bool:
    return intersection_graph(pi).two_coloring() is not None


# ---------------------------------------------------------------------------
# noncrossing closure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClosureDecomposition:
    """``closure`` is noncrossing; ``components[T]`` is the relabelled restriction to ``T``."""

    closure: Partition
    components: dict[Block, Partition]

    def reassemble(self) -> Partition:
        blocks = []
        for support, part in self.components.items():
            for b in part.blocks:
                blocks.append([support[x - 1] for x in b])
        return Partition.from_blocks(blocks, self.closure.p)


def relabel(blocks: Iterable[Sequence[int]], support: Sequence[int]) -> Partition:
    """Order-preserving relabelling of ``blocks`` (living on ``support``) onto ``1..len(support)``."""
    pos = {x: i + 1 for i, x in enumerate(sorted(support))}
    out = Partition.from_blocks([[pos[x] for x in b] for b in blocks], len(pos))
    return as_pairing(out) if out.is_pairing and out.p else out


def noncrossing_closure(pi: Partition) -> ClosureDecomposition:
    """Group blocks by crossing-connected component.

    Each component's support becomes one block of the closure; the component
    itself is kept, relabelled onto ``1..|T|``.
    """
    g = intersection_graph(pi)
    supports = []
    components = {}
    for comp in g.components():
        members = [pi.blocks[i] for i in comp]
        support = tuple(sorted(x for b in members for x in b))
        supports.append(support)
        components[support] = relabel(members, support)
    closure = Partition.from_blocks(supports, pi.p)
    ordered = {b: components[b] for b in closure.blocks}
    return ClosureDecomposition(closure, ordered)


# ---------------------------------------------------------------------------
# counts
# ---------------------------------------------------------------------------

_count_lock = threading.Lock()
_connected_cache: dict[tuple[str, int], int] = {}


def _memo_count(kind: str, p: int, compute) -> int:
    key = (kind, p)
    with _count_lock:
        if key in _connected_cache:
            return _connected_cache[key]
    value = compute()
    with _count_lock:
        _connected_cache[key] = value
    return value


def count_connected(p: int, cap: int = PAIR_CAP) -> int:
    """Connected pair partitions of ``[p]``, filtering the stream by the crossing graph."""
    _check_even(p)
    _check_cap(p, cap, "connected count")
    return _memo_count(
        "graph", p, lambda: sum(1 for pi in enumerate_pair_partitions(p, cap) if is_connected(pi))
    )


def count_connected_by_intervals(p: int, cap: int = PAIR_CAP) -> int:
    """Same count as :func:`count_connected`, filtering by the subinterval definition."""
    _check_even(p)
    _check_cap(p, cap, "connected count")
    return _memo_count(
        "interval",
        p,
        lambda: sum(1 for pi in enumerate_pair_partitions(p, cap) if is_connected_by_intervals(pi)),
    )


def count_bipartite_connected_by_filter(p: int, cap: int = PAIR_CAP) -> int:
    """Bipartite connected pairings by filtering the plain stream (slow reference path)."""
    _check_even(p)
    _check_cap(p, cap, "bipartite connected count")
    return sum(
        1 for pi in enumerate_pair_partitions(p, cap) if is_connected(pi) and is_bipartite(pi)
    )


def count_bipartite_connected(p: int, cap: int = PAIR_CAP, workers: int = 1) -> int:
    if p == 0:
        return 0
    profile = bipartite_profile(p, cap=cap, workers=workers)
    return sum(n for (cc, _cr), n in profile.items() if cc == 1)


# ---------------------------------------------------------------------------
# pruned enumeration of bipartite pairings
# ---------------------------------------------------------------------------


def _profile_walk(remaining: tuple[int, ...], rights: tuple[int, ...], comp: tuple[int, ...],
                  color: tuple[int, ...], crossing: tuple[bool, ...], cc: int, cr: int,
                  next_id: int, out: Counter) -> None:
    if not remaining:
        out[(cc, cr)] += 1
        return
    a = remaining[0]
    nb = len(rights)
    for idx in range(1, len(remaining)):
        b = remaining[idx]
        rest = remaining[1:idx] + remaining[idx + 1 :]
        # Earlier blocks all open before ``a``; they cross (a, b) iff they close inside it.
        nbrs = [k for k in range(nb) if a < rights[k] < b]
        if not nbrs:
            _profile_walk(rest, rights + (b,), comp + (next_id,), color + (0,),
                          crossing + (False,), cc + 1, cr, next_id + 1, out)
            continue
        seen: dict[int, int] = {}
        ok = True
        for k in nbrs:
            c = comp[k]
            if seen.setdefault(c, color[k]) != color[k]:
                ok = False
                break
        if not ok:
            continue
        # New block gets color 0; flip every merged component whose neighbours are 0.
        target = next_id
        new_comp = list(comp)
        new_color = list(color)
        for k in range(nb):
            c = comp[k]
            if c in seen:
                new_comp[k] = target
                if seen[c] == 0:
                    new_color[k] ^= 1
        new_crossing = list(crossing)
        added = 1
        for k in nbrs:
            if not new_crossing[k]:
                new_crossing[k] = True
                added += 1
        _profile_walk(rest, rights + (b,), tuple(new_comp) + (target,), tuple(new_color) + (0,),
                      tuple(new_crossing) + (True,), cc - len(seen) + 1, cr + added,
                      next_id + 1, out)


def _profile_chunk(p: int, first_partner: int) -> Counter:
    out: Counter = Counter()
    rest = tuple(x for x in range(2, p + 1) if x != first_partner)
    _profile_walk(rest, (first_partner,), (0,), (0,), (False,), 1, 0, 1, out)
    return out


_profile_cache: dict[int, dict[tuple[int, int], int]] = {}


def bipartite_profile(p: int, cap: int = PAIR_CAP, workers: int = 1) -> dict[tuple[int, int], int]:
    """Count bipartite pair partitions of ``[p]`` by ``(cc, cr)``.

    Pairings are built left to right; crossings of a new block are read off
    from the right endpoints of earlier blocks, and components are merged
    with a parity-tracking relabel so that odd cycles are pruned as soon as
    they appear.  Chunks keyed by the partner of 1 are independent and can be
    spread over ``workers`` processes.
    """
    _check_even(p)
    _check_cap(p, cap, "bipartite profile")
    with _count_lock:
        if p in _profile_cache:
            return dict(_profile_cache[p])
    if p == 0:
        total = Counter({(0, 0): 1})
    else:
        partners = range(2, p + 1)
        total = Counter()
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for part in pool.map(_profile_chunk, [p] * len(partners), partners):
                    total.update(part)
        else:
            for b in partners:
                total.update(_profile_chunk(p, b))
    result = dict(sorted(total.items()))
    with _count_lock:
        _profile_cache[p] = result
    return dict(result)
