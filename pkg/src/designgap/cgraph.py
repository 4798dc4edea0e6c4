"""Commutator graphs of Pauli generator sets, explored as implicit graphs.

Vertices are the 4^n phaseless Pauli strings, encoded as 2n-bit integers
(``pauli.to_key``).  A generator H connects P to the projective product HP
exactly when H and P anticommute, so a neighbor step is a pure XOR of bit
words plus a parity test; no edge lists are ever built.  Components, N-balls,
diameters, and region fractions all run on these integer keys.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from . import pauli
from .errors import BudgetError, ValidationError

COMPONENT_SIZE_CAP = 5_000_000
CENSUS_QUBIT_CAP = 10
DIAMETER_EXACT_LIMIT = 100_000


@dataclass(frozen=True)
class GeneratorSet:
    """A set of Hermitian Pauli generators on a common qubit count."""

    n: int
    generators: tuple[pauli.PauliString, ...]

    def __post_init__(self):
        seen = set()
        for g in self.generators:
            if g.n != self.n:
                raise ValidationError(f"generator {g} has {g.n} qubits, expected {self.n}")
            key = pauli.to_key(g)
            if key == 0:
                raise ValidationError("identity is not a valid generator")
            if key in seen:
                raise ValidationError(f"duplicate generator {pauli.to_text(g)} (up to phase)")
            seen.add(key)


@dataclass(frozen=True)
class ComponentSummary:
    """A BFS component: size, membership keys, and distances from the root."""

    n: int
    size: int
    representative: pauli.PauliString
    members: frozenset[int]
    distances: dict[int, int]


@dataclass(frozen=True)
class DiameterResult:
    value: int
    mode: str  # "exact" or "lower-bound"


def _gen_words(S: GeneratorSet) -> list[tuple[int, int, int]]:
    out = []
    for g in S.generators:
        out.append((pauli.to_key(g), g.x_bits, g.z_bits))
    return out


def _anticommutes(vx: int, vz: int, gx: int, gz: int) -> bool:
    return ((vx & gz).bit_count() + (vz & gx).bit_count()) % 2 == 1


def neighbors(P: pauli.PauliString, S: GeneratorSet) -> tuple[pauli.PauliString, ...]:
    """Distinct projective products HP over anticommuting generators H."""
    if P.n != S.n:
        raise ValidationError(f"size mismatch: {P.n} vs {S.n} qubits")
    v = pauli.to_key(P)
    keys = set()
    for gkey, gx, gz in _gen_words(S):
        if _anticommutes(P.x_bits, P.z_bits, gx, gz):
            keys.add(v ^ gkey)
    return tuple(pauli.from_key(k, P.n) for k in sorted(keys))


def _bfs(
    start_key: int,
    words: list[tuple[int, int, int]],
    n: int,
    max_dist: int | None = None,
    max_size: int = COMPONENT_SIZE_CAP,
) -> dict[int, int]:
    """Distances from start_key, optionally truncated at max_dist."""
    mask = (1 << n) - 1
    dist = {start_key: 0}
    frontier = deque([start_key])
    while frontier:
        v = frontier.popleft()
        dv = dist[v]
        if max_dist is not None and dv >= max_dist:
            continue
        vx, vz = v >> n, v & mask
        for gkey, gx, gz in words:
            if _anticommutes(vx, vz, gx, gz):
                w = v ^ gkey
                if w not in dist:
                    if len(dist) >= max_size:
                        raise BudgetError(f"component exceeds {max_size} vertices")
                    dist[w] = dv + 1
                    frontier.append(w)
    return dist


def component(P: pauli.PauliString, S: GeneratorSet) -> ComponentSummary:
    """BFS closure of P under neighbor steps; representative is P itself."""
    if P.n != S.n:
        raise ValidationError(f"size mismatch: {P.n} vs {S.n} qubits")
    dist = _bfs(pauli.to_key(P), _gen_words(S), S.n)
    return ComponentSummary(
        n=S.n,
        size=len(dist),
        representative=pauli.hermitian_representative(P),
        members=frozenset(dist),
        distances=dist,
    )


def n_ball(P: pauli.PauliString, S: GeneratorSet, N: int) -> frozenset[int]:
    """Vertex keys within graph distance N of P."""
    if N < 0:
        raise ValidationError(f"negative radius {N}")
    dist = _bfs(pauli.to_key(P), _gen_words(S), S.n, max_dist=N)
    return frozenset(dist)


def ball_sizes(P: pauli.PauliString, S: GeneratorSet, up_to: int | None = None) -> list[int]:
    """Cumulative ball sizes |B_0|, |B_1|, ... out to up_to or saturation."""
    dist = _bfs(pauli.to_key(P), _gen_words(S), S.n, max_dist=up_to)
    radius = max(dist.values())
    counts = [0] * (radius + 1)
    for d in dist.values():
        counts[d] += 1
    sizes = []
    running = 0
    for c in counts:
        running += c
        sizes.append(running)
    return sizes


def r_fraction(
    P: pauli.PauliString, S: GeneratorSet, region: tuple[int, ...]
) -> tuple[Fraction, float]:
    """Fraction of P's component supported inside the region, exactly."""
    reg = set(region)
    if not reg.issuperset(pauli.support(P)):
        raise ValidationError("perturbation support must lie inside the region")
    if not reg.issubset(range(S.n)):
        raise ValidationError(f"region {sorted(reg)} outside 0..{S.n - 1}")
    region_bits = 0
    for q in reg:
        region_bits |= 1 << q
    comp = component(P, S)
    mask = (1 << S.n) - 1
    inside = 0
    for key in comp.members:
        if ((key >> S.n) | (key & mask)) & ~region_bits == 0:
            inside += 1
    frac = Fraction(inside, comp.size)
    return frac, float(frac)


def diameter(
    C: ComponentSummary,
    S: GeneratorSet,
    mode: str = "auto",
    exact_limit: int = DIAMETER_EXACT_LIMIT,
) -> DiameterResult:
    """Largest eccentricity in the component.

    Exact mode runs a BFS from every vertex; lower-bound mode does a double
    sweep (BFS to the farthest vertex, then BFS from it) and can undershoot.
    """
    words = _gen_words(S)
    if mode not in ("auto", "exact", "lower-bound"):
        raise ValidationError(f"unknown diameter mode {mode!r}")
    run_exact = mode == "exact" or (mode == "auto" and C.size <= exact_limit)
    if run_exact:
        best = 0
        for key in C.members:
            dist = _bfs(key, words, C.n)
            best = max(best, max(dist.values()))
        return DiameterResult(best, "exact")
    start = pauli.to_key(C.representative)
    first = _bfs(start, words, C.n)
    far = max(first, key=lambda k: (first[k], k))
    second = _bfs(far, words, C.n)
    return DiameterResult(max(second.values()), "lower-bound")


def majorana_count(P: pauli.PauliString) -> int:
    """Majorana monomial length; constant on matchgate components."""
    return pauli.majorana_count(P)


def census(S: GeneratorSet) -> list[ComponentSummary]:
    """All components of the graph, in ascending order of their smallest key."""
    if S.n > CENSUS_QUBIT_CAP:
        raise BudgetError(f"census over 4^{S.n} Paulis exceeds cap n={CENSUS_QUBIT_CAP}")
    words = _gen_words(S)
    total = 1 << (2 * S.n)
    visited = bytearray(total)
    out = []
    for key in range(total):
        if visited[key]:
            continue
        dist = _bfs(key, words, S.n)
        for k in dist:
            visited[k] = 1
        out.append(
            ComponentSummary(
                n=S.n,
                size=len(dist),
                representative=pauli.from_key(key, S.n),
                members=frozenset(dist),
                distances=dist,
            )
        )
    return out
