"""Group specifications: generator sets, invariant forms, and samplers.

Supported kinds: matchgate, orthogonal, symplectic, unitary, mixed_unitary,
clifford, and custom Pauli-compatible groups given by explicit generator
sets.  Each form-bearing kind carries an invariant bilinear form Omega with
U^T Omega U = Omega for every group element; the form certifies the two-copy
invariant state (1 x Omega)|Phi>.

Haar samplers: QR of Ginibre ensembles for the unitary and orthogonal groups;
a Gram-Schmidt construction compatible with the quaternionic structure
T(v) = Omega conj(v) for the compact symplectic group; and, for the matchgate
group, a Haar SO(2n) rotation decomposed into Givens planes and lifted
factor-by-factor through exp(theta/2 c_a c_b).  Lifts are unique only up to a
global sign, which no estimated quantity is sensitive to.

Shallow ensembles are brickwork circuits of 2-local group gates over a
declared adjacency; the conjugation lightcone is computed conservatively as
one adjacency expansion per layer.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from . import cgraph, densesim, pauli
from .errors import BudgetError, ValidationError

GROUP_KINDS = (
    "matchgate",
    "orthogonal",
    "symplectic",
    "unitary",
    "mixed_unitary",
    "clifford",
    "custom_pauli_compatible",
)

SYMPLECTIC_FORM_QUBIT = 1  # for n >= 2; n = 1 uses qubit 0
SAMPLER_SELF_CHECK_TOL = 1e-8
MATCHGATE_LOCAL_FACTORS = 12


# ---------------------------------------------------------------------------
# bilinear forms


@dataclass(frozen=True, eq=False)
class BilinearForm:
    """An invariant bilinear form, as a phased Pauli or a dense matrix."""

    representation: pauli.PauliString | np.ndarray
    symmetry: str  # "symmetric" | "antisymmetric"

    @property
    def is_pauli(self) -> bool:
        return isinstance(self.representation, pauli.PauliString)

    @property
    def n(self) -> int:
        if self.is_pauli:
            return self.representation.n
        return self.representation.shape[0].bit_length() - 1

    def dense(self) -> np.ndarray:
        if self.is_pauli:
            return pauli.to_dense(self.representation)
        return np.array(self.representation, dtype=np.complex128)

    def inverse_dense(self) -> np.ndarray:
        if self.is_pauli:
            return self.dense().conj().T  # phased Paulis are unitary
        return np.linalg.inv(self.dense())


def bilinear_form(representation) -> BilinearForm:
    """Wrap a Pauli or dense matrix, deriving its transposition symmetry."""
    if isinstance(representation, pauli.PauliString):
        sign = pauli.transpose_sign(representation)
        return BilinearForm(representation, "symmetric" if sign == 1 else "antisymmetric")
    M = np.asarray(representation, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValidationError("dense form must be a square matrix")
    if np.allclose(M.T, M, atol=1e-10):
        return BilinearForm(M, "symmetric")
    if np.allclose(M.T, -M, atol=1e-10):
        return BilinearForm(M, "antisymmetric")
    raise ValidationError("form is neither symmetric nor antisymmetric")


def matchgate_form_1(n: int) -> BilinearForm:
    """The alternating form XYXY... preserved by matchgate circuits."""
    return bilinear_form(pauli.from_text("XY" * (n // 2) + "X" * (n % 2)))


def matchgate_form_2(n: int) -> BilinearForm:
    """The complementary alternating form YXYX..."""
    return bilinear_form(pauli.from_text("YX" * (n // 2) + "Y" * (n % 2)))


def orthogonal_form(n: int) -> BilinearForm:
    return bilinear_form(pauli.identity(n))


def symplectic_form_qubit(n: int) -> int:
    return SYMPLECTIC_FORM_QUBIT if n >= 2 else 0


def symplectic_form(n: int) -> BilinearForm:
    """The antisymmetric form i Y on the designated form qubit."""
    q = symplectic_form_qubit(n)
    rep = pauli.PauliString(n, 1 << q, 1 << q, 1)  # i times Y_q
    return bilinear_form(rep)


def pauli_form_condition(P: pauli.PauliString, form_pauli: pauli.PauliString) -> bool:
    """True iff P^T Omega + Omega P = 0 for the phaseless Pauli form.

    With P^T = (-1)^{#Y} P the condition says: even-Y generators must
    anticommute with the form word, odd-Y generators must commute.
    """
    comm = pauli.commutes(P, form_pauli)
    return comm if pauli.y_count(P) % 2 == 1 else not comm


def invariant_form_check(form: BilinearForm, S: cgraph.GeneratorSet) -> bool:
    """Every generator P satisfies P^T Omega + Omega P = 0."""
    if form.n != S.n:
        raise ValidationError(f"form on {form.n} qubits, generators on {S.n}")
    if form.is_pauli:
        word = pauli.hermitian_representative(form.representation)
        return all(pauli_form_condition(g, word) for g in S.generators)
    Om = form.dense()
    for g in S.generators:
        G = pauli.to_dense(g)
        if not np.allclose(G.T @ Om + Om @ G, 0.0, atol=1e-10):
            return False
    return True


def invariant_state(form: BilinearForm, n: int) -> np.ndarray:
    """The unit-norm two-copy state (1 x Omega)|Phi>."""
    if form.n != n:
        raise ValidationError(f"form on {form.n} qubits, requested n={n}")
    psi = densesim.apply_two_copy(
        np.eye(1 << n, dtype=np.complex128), form.dense(), densesim.bell_state(n)
    )
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > 1e-10:
        psi = psi / norm
    return psi


# ---------------------------------------------------------------------------
# generator sets


def matchgate_standard_set(n: int) -> cgraph.GeneratorSet:
    """Single-qubit Z plus nearest-neighbor XX."""
    gens = [pauli.PauliString(n, 0, 1 << i) for i in range(n)]
    gens += [pauli.PauliString(n, 0b11 << i, 0) for i in range(n - 1)]
    return cgraph.GeneratorSet(n, tuple(gens))


def matchgate_full_set(n: int) -> cgraph.GeneratorSet:
    """All n(2n-1) Majorana bilinears c_a c_b with a < b."""
    gens = []
    for a in range(1, 2 * n + 1):
        for b in range(a + 1, 2 * n + 1):
            gens.append(pauli.hermitian_representative(pauli.majorana_product((a, b), n)))
    return cgraph.GeneratorSet(n, tuple(gens))


def _chain_local_paulis(n: int) -> list[pauli.PauliString]:
    """All nontrivial Paulis supported on one site or a nearest-neighbor pair."""
    out = []
    for key in range(1, 4):
        for i in range(n):
            x = (key >> 1) << i
            z = (key & 1) << i
            out.append(pauli.PauliString(n, x, z))
    for a in range(1, 4):
        for b in range(1, 4):
            for i in range(n - 1):
                x = ((a >> 1) << i) | ((b >> 1) << (i + 1))
                z = ((a & 1) << i) | ((b & 1) << (i + 1))
                out.append(pauli.PauliString(n, x, z))
    return out


def unitary_local_set(n: int) -> cgraph.GeneratorSet:
    """All 1- and 2-local chain Paulis; generates the full unitary algebra."""
    return cgraph.GeneratorSet(n, tuple(_chain_local_paulis(n)))


def orthogonal_local_set(n: int) -> cgraph.GeneratorSet:
    """Chain-local Paulis with odd Y count; exp(i theta P) is then real."""
    gens = [g for g in _chain_local_paulis(n) if pauli.y_count(g) % 2 == 1]
    return cgraph.GeneratorSet(n, tuple(gens))


def symplectic_local_set(n: int) -> cgraph.GeneratorSet:
    """Chain-local Paulis satisfying the form condition for i Y_fq."""
    word = pauli.hermitian_representative(symplectic_form(n).representation)
    gens = [g for g in _chain_local_paulis(n) if pauli_form_condition(g, word)]
    return cgraph.GeneratorSet(n, tuple(gens))


# ---------------------------------------------------------------------------
# adjacency and lightcones


@dataclass(frozen=True)
class Adjacency:
    """A spatial interaction graph with a deterministic brickwork schedule."""

    n: int
    edges: tuple[tuple[int, int], ...]
    layer_classes: tuple[tuple[tuple[int, int], ...], ...]
    name: str = "custom"

    def neighbor_map(self) -> dict[int, tuple[int, ...]]:
        nbrs: dict[int, set[int]] = {q: set() for q in range(self.n)}
        for a, b in self.edges:
            nbrs[a].add(b)
            nbrs[b].add(a)
        return {q: tuple(sorted(v)) for q, v in nbrs.items()}


def _greedy_classes(edges, n):
    classes: list[list[tuple[int, int]]] = []
    for edge in edges:
        for cls in classes:
            if all(edge[0] not in e and edge[1] not in e for e in cls):
                cls.append(edge)
                break
        else:
            classes.append([edge])
    return tuple(tuple(cls) for cls in classes)


def chain_adjacency(n: int) -> Adjacency:
    edges = tuple((i, i + 1) for i in range(n - 1))
    even = tuple(e for e in edges if e[0] % 2 == 0)
    odd = tuple(e for e in edges if e[0] % 2 == 1)
    classes = tuple(c for c in (even, odd) if c)
    return Adjacency(n, edges, classes, "chain")


def grid_adjacency(rows: int, cols: int) -> Adjacency:
    def q(r, c):
        return r * cols + c

    horiz = [(q(r, c), q(r, c + 1)) for r in range(rows) for c in range(cols - 1)]
    vert = [(q(r, c), q(r + 1, c)) for r in range(rows - 1) for c in range(cols)]
    classes = [
        tuple(e for e in horiz if (e[0] % cols) % 2 == 0),
        tuple(e for e in horiz if (e[0] % cols) % 2 == 1),
        tuple(e for e in vert if (e[0] // cols) % 2 == 0),
        tuple(e for e in vert if (e[0] // cols) % 2 == 1),
    ]
    classes = tuple(c for c in classes if c)
    return Adjacency(rows * cols, tuple(horiz + vert), classes, f"grid {rows}x{cols}")


def parse_adjacency(spec, n: int) -> Adjacency:
    """Build an adjacency from "chain", "grid RxC", or an explicit edge list."""
    if isinstance(spec, Adjacency):
        if spec.n != n:
            raise ValidationError(f"adjacency has {spec.n} qubits, expected {n}")
        return spec
    if isinstance(spec, str):
        text = spec.strip().lower()
        if text == "chain":
            return chain_adjacency(n)
        if text.startswith("grid"):
            try:
                rows, cols = (int(v) for v in text[4:].replace(" ", "").split("x"))
            except Exception as exc:
                raise ValidationError(f"bad grid spec {spec!r}, expected 'grid RxC'") from exc
            if rows * cols != n:
                raise ValidationError(f"grid {rows}x{cols} does not match n={n}")
            return grid_adjacency(rows, cols)
        raise ValidationError(f"unknown adjacency {spec!r}")
    edges = []
    for e in spec:
        a, b = int(e[0]), int(e[1])
        if not (0 <= a < n and 0 <= b < n and a != b):
            raise ValidationError(f"bad edge {e} for n={n}")
        edges.append((min(a, b), max(a, b)))
    edges = tuple(sorted(set(edges)))
    return Adjacency(n, edges, _greedy_classes(edges, n), "custom")


def lightcone(V_support, L: int, adjacency: Adjacency) -> tuple[int, ...]:
    """Qubits reachable from the support in at most L adjacency expansions."""
    if L < 0:
        raise ValidationError(f"negative depth {L}")
    reached = set(V_support)
    nbrs = adjacency.neighbor_map()
    for _ in range(L):
        grown = set(reached)
        for q in reached:
            grown.update(nbrs.get(q, ()))
        if grown == reached:
            break
        reached = grown
    return tuple(sorted(reached))


# ---------------------------------------------------------------------------
# group specifications


@dataclass(frozen=True, eq=False)
class GroupSpec:
    """A named group with its generator set and optional invariant form."""

    kind: str
    n: int
    generator_set: cgraph.GeneratorSet | None = None
    form: BilinearForm | None = None

    @property
    def dense_dimension(self) -> int:
        return 1 << self.n

    def __post_init__(self):
        if self.kind not in GROUP_KINDS:
            raise ValidationError(f"unknown group kind {self.kind!r}")
        if self.n < 1:
            raise ValidationError(f"need n >= 1, got {self.n}")
        if self.form is not None and self.generator_set is not None:
            if not invariant_form_check(self.form, self.generator_set):
                raise ValidationError(f"{self.kind} generators do not preserve the form")


def group_spec(kind: str, n: int, generator_set=None, form=None) -> GroupSpec:
    """Construct a GroupSpec with the shipped defaults for each kind."""
    if kind == "matchgate":
        return GroupSpec(kind, n, generator_set or matchgate_standard_set(n), form or matchgate_form_1(n))
    if kind == "orthogonal":
        return GroupSpec(kind, n, generator_set or orthogonal_local_set(n), form or orthogonal_form(n))
    if kind == "symplectic":
        return GroupSpec(kind, n, generator_set or symplectic_local_set(n), form or symplectic_form(n))
    if kind in ("unitary", "mixed_unitary"):
        return GroupSpec(kind, n, generator_set or unitary_local_set(n), form)
    if kind == "clifford":
        if n > 2:
            raise BudgetError(f"clifford enumeration capped at n=2, got n={n}")
        return GroupSpec(kind, n, None, None)
    if kind == "custom_pauli_compatible":
        if generator_set is None:
            raise ValidationError("custom groups need an explicit generator set")
        return GroupSpec(kind, n, generator_set, form)
    raise ValidationError(f"unknown group kind {kind!r}")


# ---------------------------------------------------------------------------
# Haar samplers


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar U(d) via QR of a complex Ginibre matrix with phase fix."""
    Z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    Q, R = np.linalg.qr(Z)
    diag = np.diagonal(R)
    return Q * (diag / np.abs(diag))


def haar_orthogonal(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar O(d) via QR of a real Ginibre matrix with sign fix."""
    Z = rng.normal(size=(d, d))
    Q, R = np.linalg.qr(Z)
    return (Q * np.sign(np.diagonal(R))).astype(np.complex128)


def haar_special_orthogonal(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar SO(d): an O(d) draw with a column reflection on negative det."""
    Q = haar_orthogonal(d, rng).real
    if np.linalg.det(Q) < 0:
        Q = Q.copy()
        Q[:, -1] = -Q[:, -1]
    return Q


def _canonical_symplectic_j(d: int) -> np.ndarray:
    iy = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(iy, np.eye(d // 2)).astype(np.complex128)


def _haar_symplectic_canonical(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar on the compact symplectic group preserving the block form J.

    Columns are built by Gram-Schmidt against both previous columns and their
    images under the antilinear map T(v) = J conj(v); the second block of
    columns is -T of the first.  Equivariance of T under left multiplication
    by symplectic unitaries makes the law left-invariant, hence Haar.
    """
    if d % 2:
        raise ValidationError(f"symplectic dimension must be even, got {d}")
    J = _canonical_symplectic_j(d)
    us: list[np.ndarray] = []
    pool: list[np.ndarray] = []
    for _ in range(d // 2):
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        for _ in range(2):  # two passes for numerical orthogonality
            for w in pool:
                v = v - w * np.vdot(w, v)
        u = v / np.linalg.norm(v)
        us.append(u)
        pool.append(u)
        pool.append(J @ u.conj())
    U = np.column_stack(us + [-(J @ u.conj()) for u in us])
    return U


def _swap_qubit_permutation(a: int, b: int, n: int) -> np.ndarray:
    """Dense permutation exchanging two qubits."""
    d = 1 << n
    idx = np.arange(d, dtype=np.int64)
    pa, pb = n - 1 - a, n - 1 - b
    bit_a = (idx >> pa) & 1
    bit_b = (idx >> pb) & 1
    swapped = idx ^ ((bit_a ^ bit_b) << pa) ^ ((bit_a ^ bit_b) << pb)
    M = np.zeros((d, d), dtype=np.complex128)
    M[swapped, idx] = 1.0
    return M


def haar_symplectic(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar element of the compact symplectic group for the shipped form."""
    d = 1 << n
    U = _haar_symplectic_canonical(d, rng)
    fq = symplectic_form_qubit(n)
    if fq != 0:
        P = _swap_qubit_permutation(0, fq, n)
        U = P @ U @ P
    return U


@functools.lru_cache(maxsize=None)
def _majorana_bilinear(n: int, a: int, b: int) -> pauli.PauliString:
    return pauli.majorana_product((a, b), n)


def _lift_rotation(a: int, b: int, theta: float, n: int) -> np.ndarray:
    """Dense exp(theta/2 c_a c_b); conjugation rotates the (a, b) plane."""
    cab = pauli.to_dense(_majorana_bilinear(n, a, b))
    d = 1 << n
    return math.cos(theta / 2) * np.eye(d, dtype=np.complex128) + math.sin(theta / 2) * cab


def givens_decompose(R: np.ndarray) -> list[tuple[int, int, float]]:
    """Plane rotations (a, b, theta) composing to R in SO(m).

    Each factor G(a, b, theta) maps e_a to cos(theta) e_a - sin(theta) e_b and
    e_b to sin(theta) e_a + cos(theta) e_b.  The factors compose right to
    left: for a returned list [t_1, ..., t_k], R = G(t_k) ... G(t_1).
    """
    M = np.array(R, dtype=np.float64)
    m = M.shape[0]
    applied = []
    for j in range(m - 1):
        for i in range(m - 1, j, -1):
            if abs(M[i, j]) < 1e-15:
                continue
            theta = math.atan2(M[i, j], M[i - 1, j])
            c, s = math.cos(theta), math.sin(theta)
            upper = c * M[i - 1] + s * M[i]
            lower = -s * M[i - 1] + c * M[i]
            M[i - 1], M[i] = upper, lower
            applied.append((i - 1, i, theta))
    if not np.allclose(M, np.eye(m), atol=1e-9):
        raise ValidationError("Givens decomposition expects a special orthogonal input")
    return [(a, b, -theta) for a, b, theta in reversed(applied)]


def haar_matchgate(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar matchgate unitary via an SO(2n) draw lifted plane by plane.

    Composing the lifts in the same right-to-left order as the rotations
    makes the adjoint action on Majorana coordinates reproduce R exactly, so
    Haar measure on SO(2n) pushes forward to the projective group.
    """
    R = haar_special_orthogonal(2 * n, rng)
    U = np.eye(1 << n, dtype=np.complex128)
    for a, b, theta in givens_decompose(R):
        U = _lift_rotation(a + 1, b + 1, theta, n) @ U
    return U


@functools.lru_cache(maxsize=2)
def enumerate_clifford(n: int) -> tuple[np.ndarray, ...]:
    """All projective n-qubit Cliffords (24 at n=1, 11520 at n=2) by closure."""
    if n not in (1, 2):
        raise BudgetError(f"clifford enumeration supports n=1,2 only, got {n}")
    H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
    S = np.diag([1.0, 1.0j]).astype(np.complex128)
    gens = []
    for q in range(n):
        gens.append(densesim.embed(H, (q,), n))
        gens.append(densesim.embed(S, (q,), n))
    if n == 2:
        gens.append(np.diag([1.0, 1.0, 1.0, -1.0]).astype(np.complex128))  # CZ

    def canonical_key(M: np.ndarray) -> bytes:
        flat = M.reshape(-1)
        pivot = flat[np.argmax(np.abs(flat) > 1e-8)]
        normalized = M / (pivot / abs(pivot))
        # adding 0.0 collapses -0.0 to +0.0, which tobytes would distinguish
        return (np.round(normalized, 8) + 0.0).tobytes()

    start = np.eye(1 << n, dtype=np.complex128)
    seen = {canonical_key(start)}
    order = [start]
    queue = [start]
    while queue:
        current = queue.pop(0)
        for g in gens:
            candidate = g @ current
            key = canonical_key(candidate)
            if key not in seen:
                seen.add(key)
                candidate.setflags(write=False)
                order.append(candidate)
                queue.append(candidate)
    return tuple(order)


def adjoint_majorana_matrix(U: np.ndarray, n: int) -> tuple[np.ndarray, float]:
    """The matrix O with U c_a U^dag = sum_b O[b, a] c_b, plus residual."""
    d = 1 << n
    cs = [pauli.to_dense(pauli.majorana(a, n)) for a in range(1, 2 * n + 1)]
    O = np.zeros((2 * n, 2 * n))
    resid = 0.0
    for a in range(2 * n):
        image = U @ cs[a] @ U.conj().T
        coeffs = np.array([np.trace(c @ image) / d for c in cs])
        O[:, a] = coeffs.real
        recon = sum(coeffs.real[b] * cs[b] for b in range(2 * n))
        resid = max(resid, float(np.max(np.abs(image - recon))))
    return O, resid


def sample_haar(G: GroupSpec, rng: np.random.Generator) -> np.ndarray:
    """One Haar draw from the group, self-checked against its form."""
    d = G.dense_dimension
    if G.n > pauli.DENSE_QUBIT_CAP:
        raise BudgetError(f"dense sampling for n={G.n} exceeds cap {pauli.DENSE_QUBIT_CAP}")
    if G.kind in ("unitary", "mixed_unitary"):
        return haar_unitary(d, rng)
    if G.kind == "orthogonal":
        return haar_orthogonal(d, rng)
    if G.kind == "symplectic":
        U = haar_symplectic(G.n, rng)
    elif G.kind == "matchgate":
        U = haar_matchgate(G.n, rng)
    elif G.kind == "clifford":
        table = enumerate_clifford(G.n)
        return np.array(table[int(rng.integers(len(table)))])
    else:
        raise ValidationError(f"no Haar sampler for kind {G.kind!r}")
    if G.form is not None:
        Om = G.form.dense()
        drift = float(np.max(np.abs(U.T @ Om @ U - Om)))
        if drift > SAMPLER_SELF_CHECK_TOL:
            raise RuntimeError(f"{G.kind} sampler drifted off the form by {drift:.2e}")
    return U


# ---------------------------------------------------------------------------
# shallow brickwork ensembles


@dataclass(frozen=True, eq=False)
class ShallowCircuit:
    """A sampled brickwork circuit with enough layout to audit lightcones."""

    unitary: np.ndarray
    depth: int
    adjacency: Adjacency
    layers: tuple[tuple[tuple[tuple[int, int], np.ndarray], ...], ...] = field(repr=False)


_LOCAL_MATCHGATE_GENS = ("ZI", "IZ", "XX", "XY", "YX", "YY")


def _local_gate(kind: str, pair: tuple[int, int], n: int, rng: np.random.Generator) -> np.ndarray:
    if kind == "matchgate":
        U = np.eye(4, dtype=np.complex128)
        for _ in range(MATCHGATE_LOCAL_FACTORS):
            g = _LOCAL_MATCHGATE_GENS[int(rng.integers(len(_LOCAL_MATCHGATE_GENS)))]
            theta = float(rng.uniform(0.0, 2.0 * math.pi))
            P = pauli.to_dense(pauli.from_text(g))
            U = U @ (math.cos(theta) * np.eye(4) + 1j * math.sin(theta) * P)
        return U
    if kind == "orthogonal":
        return haar_orthogonal(4, rng)
    if kind in ("unitary", "mixed_unitary"):
        return haar_unitary(4, rng)
    if kind == "symplectic":
        fq = symplectic_form_qubit(n)
        if fq in pair:
            local = _haar_symplectic_canonical(4, rng)
            if pair.index(fq) != 0:
                P = _swap_qubit_permutation(0, 1, 2)
                local = P @ local @ P
            return local
        return haar_orthogonal(4, rng)
    if kind == "clifford":
        table = enumerate_clifford(2)
        return np.array(table[int(rng.integers(len(table)))])
    raise ValidationError(f"no 2-local gate factory for kind {kind!r}")


def sample_shallow(
    G: GroupSpec, L: int, adjacency, rng: np.random.Generator
) -> ShallowCircuit:
    """A depth-L brickwork circuit of 2-local group gates."""
    if L < 0:
        raise ValidationError(f"negative depth {L}")
    adj = parse_adjacency(adjacency, G.n)
    d = G.dense_dimension
    U = np.eye(d, dtype=np.complex128)
    layers = []
    for layer_index in range(L):
        cls = adj.layer_classes[layer_index % len(adj.layer_classes)] if adj.layer_classes else ()
        layer = []
        layer_u = np.eye(d, dtype=np.complex128)
        for pair in cls:
            gate = _local_gate(G.kind, pair, G.n, rng)
            layer.append((pair, gate))
            layer_u = densesim.embed(gate, pair, G.n) @ layer_u
        layers.append(tuple(layer))
        U = layer_u @ U
    if G.form is not None and L > 0:
        Om = G.form.dense()
        drift = float(np.max(np.abs(U.T @ Om @ U - Om)))
        if drift > SAMPLER_SELF_CHECK_TOL:
            raise RuntimeError(f"shallow {G.kind} circuit drifted off the form by {drift:.2e}")
    return ShallowCircuit(U, L, adj, tuple(layers))


# ---------------------------------------------------------------------------
# membership checks


def membership_failure(U: np.ndarray, G: GroupSpec, tol: float = 1e-10) -> str | None:
    """The first failed membership condition, or None if all pass."""
    d = G.dense_dimension
    if G.kind == "mixed_unitary" and U.shape[0] == d * d:
        # Kronecker rearrangement: A x B raveled this way is vec(A) vec(B)^T.
        W = U.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)
        u, s, vh = np.linalg.svd(W)
        if s.size > 1 and s[1] > max(tol, 1e-8) * max(1.0, s[0]):
            return f"not a Kronecker product: second singular value {s[1]:.2e}"
        A = (np.sqrt(d) * u[:, 0]).reshape(d, d)
        B = (s[0] / np.sqrt(d) * vh[0]).reshape(d, d)
        if np.max(np.abs(A @ A.conj().T - np.eye(d))) > 1e-8:
            return "first Kronecker factor is not unitary"
        inner = np.trace(A.T @ B)
        phase = inner / abs(inner) if abs(inner) > tol else 1.0
        if np.max(np.abs(B - phase * A.conj())) > 1e-8:
            return "second factor is not the conjugate of the first"
        return None
    if U.shape != (d, d):
        return f"dimension {U.shape} does not match d={d}"
    unit = float(np.max(np.abs(U.conj().T @ U - np.eye(d))))
    if unit > tol:
        return f"not unitary: residual {unit:.2e}"
    if G.kind == "orthogonal" and float(np.max(np.abs(U.imag))) > tol:
        return f"not real: imaginary residual {float(np.max(np.abs(U.imag))):.2e}"
    if G.form is not None:
        Om = G.form.dense()
        resid = float(np.max(np.abs(U.T @ Om @ U - Om)))
        if resid > tol:
            return f"form not preserved: residual {resid:.2e}"
    if G.kind == "matchgate":
        O, resid = adjoint_majorana_matrix(U, G.n)
        if resid > max(tol, 1e-8):
            return f"adjoint action leaves the Majorana span: residual {resid:.2e}"
        ortho = float(np.max(np.abs(O.T @ O - np.eye(2 * G.n))))
        if ortho > max(tol, 1e-8):
            return f"adjoint action is not orthogonal: residual {ortho:.2e}"
    if G.kind == "clifford":
        if G.n > densesim.PAULI_EXPANSION_CAP:
            raise BudgetError("clifford membership check needs a full Pauli expansion")
        for q in range(G.n):
            for P in (pauli.PauliString(G.n, 1 << q, 0), pauli.PauliString(G.n, 0, 1 << q)):
                image = U @ pauli.to_dense(P) @ U.conj().T
                coeffs = np.array(list(densesim.pauli_coefficients(image).values()))
                mass = np.abs(coeffs) ** 2
                if abs(np.max(mass) - 1.0) > max(tol, 1e-9):
                    return f"conjugated {pauli.to_text(P)} is not a single Pauli"
    return None


def verify_group_membership(U: np.ndarray, G: GroupSpec, tol: float = 1e-10) -> bool:
    """True when all documented membership conditions hold at tolerance."""
    return membership_failure(U, G, tol) is None
