"""Two-copy channel discrimination experiments against shallow ensembles.

Three experiments share one shape: prepare a perturbed invariant state,
evolve both copies by the same sampled circuit, measure a fixed projective
POVM, and compare the retained probability between a depth- or gate-limited
ensemble and the full group Haar measure.  Twice the probability gap lower
bounds the diamond distance between the two-copy channels, so these runs turn
Monte Carlo estimates into quantitative design-failure certificates.

A shallow sample whose conjugation lightcone stays inside the measured region
must retain probability 1 exactly; the runners assert that per sample rather
than on average, so a miscoded ensemble fails loudly instead of washing out.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import bounds, cgraph, densesim, groups, moments, pauli, rng
from .errors import BudgetError, ValidationError

SHALLOW_EXACTNESS_TOL = 1e-9
SHALLOW_FAILURE_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class EnsembleSpec:
    """The limited ensemble under test: layered brickwork or a gate budget."""

    kind: str  # "brickwork" | "gate_count"
    depth: int | None = None
    adjacency: object = "chain"
    gates: int | None = None
    allowed: cgraph.GeneratorSet | None = None

    def __post_init__(self):
        if self.kind == "brickwork":
            if self.depth is None or self.depth < 0:
                raise ValidationError(f"brickwork ensembles need depth >= 0, got {self.depth}")
        elif self.kind == "gate_count":
            if self.gates is None or self.gates < 0:
                raise ValidationError(f"gate-count ensembles need gates >= 0, got {self.gates}")
        else:
            raise ValidationError(f"unknown ensemble kind {self.kind!r}")


def brickwork(depth: int, adjacency="chain") -> EnsembleSpec:
    return EnsembleSpec("brickwork", depth=depth, adjacency=adjacency)


def gate_count(gates: int, allowed: cgraph.GeneratorSet | None = None) -> EnsembleSpec:
    return EnsembleSpec("gate_count", gates=gates, allowed=allowed)


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """Geometry and sampling plan for one discrimination run."""

    group: groups.GroupSpec
    n: int
    perturbation: pauli.PauliString
    region: tuple[int, ...]
    ensemble: EnsembleSpec
    samples: int
    seed: int
    shot_mode: bool = False

    def __post_init__(self):
        if self.n != self.group.n:
            raise ValidationError(f"config n={self.n} does not match group n={self.group.n}")
        if self.perturbation.n != self.n:
            raise ValidationError("perturbation acts on the wrong number of qubits")
        region = tuple(sorted(set(self.region)))
        object.__setattr__(self, "region", region)
        if any(q < 0 or q >= self.n for q in region):
            raise ValidationError(f"region {region} is not a subset of 0..{self.n - 1}")
        if self.ensemble.kind == "brickwork":
            # the POVM geometry only matters for the region-based experiments
            if not set(pauli.support(self.perturbation)) <= set(region):
                raise ValidationError("perturbation support must lie inside the region")
            if len(region) == self.n:
                raise ValidationError("region complement must be nonempty")
        if self.samples < 1:
            raise ValidationError(f"need at least one sample, got {self.samples}")


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    """Estimated retention probabilities and the implied diamond bound."""

    p_shallow: moments.MomentEstimate
    p_haar: moments.MomentEstimate
    mc_bound: float
    analytic_bound: float | None
    analytic_reference: str | None
    config: ExperimentConfig
    shallow_max_deviation: float
    lightcone_confined: bool


# ---------------------------------------------------------------------------
# geometry defaults


def default_perturbation(kind: str, n: int) -> pauli.PauliString:
    """The paper-of-record site choices: mid-chain X for matchgates, else Z0."""
    if kind == "matchgate":
        if n < 2 or n % 2:
            raise ValidationError(f"mid-chain perturbation needs even n >= 2, got {n}")
        return pauli.PauliString(n, 1 << (n // 2 - 1), 0)
    return pauli.PauliString(n, 0, 1)


def default_region(n: int) -> tuple[int, ...]:
    return tuple(range(n - 1))


def default_depth(kind: str, n: int) -> int:
    return n // 2 - 1 if kind == "matchgate" else max(0, n - 2)


def depth_config(
    kind: str,
    n: int,
    samples: int,
    seed: int,
    depth: int | None = None,
    region=None,
    perturbation: pauli.PauliString | None = None,
    adjacency="chain",
    shot_mode: bool = False,
) -> ExperimentConfig:
    """A depth-experiment configuration with the shipped defaults filled in."""
    G = groups.group_spec(kind, n)
    V = perturbation if perturbation is not None else default_perturbation(kind, n)
    reg = tuple(region) if region is not None else default_region(n)
    L = depth if depth is not None else default_depth(kind, n)
    return ExperimentConfig(G, n, V, reg, brickwork(L, adjacency), samples, seed, shot_mode)


def gatecount_perturbation(n: int) -> pauli.PauliString:
    """A Pauli of Majorana weight n: the paper's worst-spread starting point."""
    if n % 2:
        return pauli.PauliString(n, 1 << ((n - 1) // 2), 0)
    return pauli.PauliString(n, 0, (1 << (n // 2)) - 1)


def gatecount_config(
    n: int,
    samples: int,
    seed: int,
    gates: int = 1,
    perturbation: pauli.PauliString | None = None,
    allowed: cgraph.GeneratorSet | None = None,
    shot_mode: bool = False,
) -> ExperimentConfig:
    """Matchgate gate-count configuration over the full bilinear generator set."""
    S = allowed if allowed is not None else groups.matchgate_full_set(n)
    G = groups.GroupSpec("matchgate", n, S, groups.matchgate_form_1(n))
    V = perturbation if perturbation is not None else gatecount_perturbation(n)
    region = tuple(range(n))  # the gate-count POVM does not use a region
    return ExperimentConfig(G, n, V, region, gate_count(gates, S), samples, seed, shot_mode)


# ---------------------------------------------------------------------------
# shared machinery


def _born_probability(psi: np.ndarray, region, n: int) -> float:
    T = densesim.complement_bell_overlap(psi, region, n)
    return float(np.sum(np.abs(T) ** 2).real)


def _finalize(p: float, stream, shot_mode: bool):
    clamped = min(1.0, max(0.0, p))
    if shot_mode:
        return float(stream.random() < clamped)
    return clamped


def _run_two_sided(shallow_fn, haar_fn, config: ExperimentConfig, threads: int):
    """Shallow samples use stream indices [0, M); Haar samples [M, 2M)."""
    M = config.samples
    rows = rng.sample_vectors(shallow_fn, M, config.seed, 2, threads)
    p_sh = moments.MomentEstimate(*rng.mean_and_stderr(rows[:, 0]), M, config.seed)
    max_dev = float(np.max(rows[:, 1]))
    vals = rng.sample_array(haar_fn, M, config.seed, threads, index_offset=M)
    p_ha = moments.MomentEstimate(*rng.mean_and_stderr(vals), M, config.seed)
    return p_sh, p_ha, max_dev


def _check_shallow_exactness(p: float, confined: bool) -> float:
    if not confined:
        return 0.0
    dev = abs(p - 1.0)
    if dev > SHALLOW_FAILURE_TOL:
        raise RuntimeError(
            f"confined shallow sample retained probability {p!r}; "
            "the lightcone bookkeeping or the ensemble is wrong"
        )
    return dev


def _result(config, p_sh, p_ha, max_dev, confined, analytic, ref) -> ExperimentResult:
    mc = bounds.discrimination_bound(
        min(1.0, max(0.0, p_sh.mean)), min(1.0, max(0.0, p_ha.mean))
    )
    return ExperimentResult(p_sh, p_ha, mc, analytic, ref, config, max_dev, confined)


# ---------------------------------------------------------------------------
# depth experiment


def _depth_analytic(config: ExperimentConfig):
    G = config.group
    n, d = config.n, 1 << config.n
    d_L = 1 << len(config.region)
    V = config.perturbation
    if G.kind == "matchgate":
        try:
            r, _ = cgraph.r_fraction(V, groups.matchgate_full_set(n), config.region)
        except (ValidationError, BudgetError):
            return None, None
        return float(bounds.pauli_compatible_bound(r)), "region-ratio-bound/matchgate"
    single_z = V.x_bits == 0 and V.z_bits.bit_count() == 1
    if not single_z:
        return None, None
    if G.kind == "orthogonal":
        p = bounds.exact_haar_povm_probability("orthogonal", d, d_L)
        return float(bounds.discrimination_bound(Fraction(1), p)), "depth-bound/orthogonal"
    if G.kind == "symplectic":
        fq = groups.symplectic_form_qubit(n)
        v_qubit = V.z_bits.bit_length() - 1
        if v_qubit == fq or fq not in config.region:
            return None, None
        p = bounds.exact_haar_povm_probability("symplectic", d, d_L)
        return float(bounds.discrimination_bound(Fraction(1), p)), "depth-bound/symplectic"
    return None, None


def run_depth_discrimination(config: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Invariant-state experiment separating brickwork depth from group Haar.

    Per sample the state (V x Omega)|Phi> evolves under U x U, the form is
    unwound on the second copy, and the POVM keeps the Bell projector on the
    region complement.  For group members this equals
    Tr[M^dag M]/(d d_C) with M the complement-traced UVU^dag, which is the
    cross-check route used by the tests.
    """
    G = config.group
    if G.form is None:
        raise ValidationError(f"depth experiment needs an invariant form; kind {G.kind!r} has none")
    if config.ensemble.kind != "brickwork":
        raise ValidationError("depth experiment takes a brickwork ensemble")
    n = config.n
    if 2 * n > densesim.STATE_QUBIT_CAP:
        raise BudgetError(f"two-copy states need 2n <= {densesim.STATE_QUBIT_CAP}")
    d = 1 << n
    eye = np.eye(d, dtype=np.complex128)
    Vd = pauli.to_dense(pauli.hermitian_representative(config.perturbation))
    Om, Om_inv = G.form.dense(), G.form.inverse_dense()
    psi0 = densesim.apply_two_copy(Vd, Om, densesim.bell_state(n))
    adj = groups.parse_adjacency(config.ensemble.adjacency, n)
    depth = config.ensemble.depth
    cone = groups.lightcone(pauli.support(config.perturbation), depth, adj)
    confined = set(cone) <= set(config.region)

    def born(U):
        psi = densesim.apply_two_copy(U, U, psi0)
        psi = densesim.apply_two_copy(eye, Om_inv, psi)
        return _born_probability(psi, config.region, n)

    def shallow_one(stream):
        circ = groups.sample_shallow(G, depth, adj, stream)
        p = born(circ.unitary)
        dev = _check_shallow_exactness(p, confined)
        return np.array([_finalize(p, stream, config.shot_mode), dev])

    def haar_one(stream):
        p = born(groups.sample_haar(G, stream))
        return _finalize(p, stream, config.shot_mode)

    p_sh, p_ha, max_dev = _run_two_sided(shallow_one, haar_one, config, threads)
    analytic, ref = _depth_analytic(config)
    return _result(config, p_sh, p_ha, max_dev, confined, analytic, ref)


# ---------------------------------------------------------------------------
# mixed-unitary (conjugate-copy) experiment


def run_mixed_unitary_discrimination(config: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Conjugate-copy experiment: state (Z_0 x 1)|Phi>, evolution U x conj(U).

    The maximally entangled state is invariant under U x conj(U), so only the
    perturbation moves; a Haar unitary spreads it by the 2-design twirl and
    the retained probability drops to d_L(d d_L - d_C)/(d(d^2 - 1)).
    """
    if config.ensemble.kind != "brickwork":
        raise ValidationError("mixed-unitary experiment takes a brickwork ensemble")
    G = config.group
    if G.kind not in ("mixed_unitary", "unitary"):
        raise ValidationError(f"mixed-unitary experiment needs a unitary-kind group, got {G.kind!r}")
    n = config.n
    if 2 * n > densesim.STATE_QUBIT_CAP:
        raise BudgetError(f"two-copy states need 2n <= {densesim.STATE_QUBIT_CAP}")
    Vd = pauli.to_dense(pauli.hermitian_representative(config.perturbation))
    psi0 = densesim.apply_two_copy(Vd, np.eye(1 << n, dtype=np.complex128), densesim.bell_state(n))
    adj = groups.parse_adjacency(config.ensemble.adjacency, n)
    depth = config.ensemble.depth
    cone = groups.lightcone(pauli.support(config.perturbation), depth, adj)
    confined = set(cone) <= set(config.region)

    def born(U):
        psi = densesim.apply_two_copy(U, U.conj(), psi0)
        return _born_probability(psi, config.region, n)

    def shallow_one(stream):
        circ = groups.sample_shallow(G, depth, adj, stream)
        p = born(circ.unitary)
        dev = _check_shallow_exactness(p, confined)
        return np.array([_finalize(p, stream, config.shot_mode), dev])

    def haar_one(stream):
        p = born(groups.haar_unitary(1 << n, stream))
        return _finalize(p, stream, config.shot_mode)

    p_sh, p_ha, max_dev = _run_two_sided(shallow_one, haar_one, config, threads)
    d, d_L = 1 << n, 1 << len(config.region)
    single_z = config.perturbation.x_bits == 0 and config.perturbation.z_bits.bit_count() == 1
    if single_z:
        analytic = float(bounds.mixed_unitary_bound(d, d_L))
        ref = "depth-bound/mixed-unitary"
    else:
        analytic, ref = None, None
    return _result(config, p_sh, p_ha, max_dev, confined, analytic, ref)


# ---------------------------------------------------------------------------
# gate-count experiment


def pauli_spread_mass(U: np.ndarray, P: pauli.PauliString, vertex_set) -> float:
    """Squared coefficient mass of U P U^dag on the given canonical vertices.

    Equals the Born probability of the projector onto span{(T x 1)|Phi>} for
    T in the set, since those states are orthonormal for distinct Paulis.
    """
    n = P.n
    if n > pauli.DENSE_QUBIT_CAP:
        raise BudgetError(f"spread mass needs n <= {pauli.DENSE_QUBIT_CAP}")
    d = 1 << n
    A = U @ pauli.to_dense(pauli.hermitian_representative(P)) @ U.conj().T
    total = 0.0
    for v in vertex_set:
        T = pauli.from_key(v, n) if isinstance(v, int) else pauli.hermitian_representative(v)
        total += abs(pauli.trace_with(T, A) / d) ** 2
    return total


def _gate_sequence_unitary(S_words, n: int, N: int, stream) -> np.ndarray:
    d = 1 << n
    U = np.eye(d, dtype=np.complex128)
    for _ in range(N):
        g = S_words[int(stream.integers(len(S_words)))]
        theta = float(stream.uniform(0.0, 2.0 * np.pi))
        P = pauli.to_dense(g)
        U = (np.cos(theta) * np.eye(d) + 1j * np.sin(theta) * P) @ U
    return U


def run_gatecount_discrimination(config: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Gate-budget experiment: mass retained inside the N-ball of the start.

    Shallow circuits are random products of N generator exponentials, whose
    conjugation provably cannot leave the ball; Haar group elements spread the
    Pauli uniformly over its whole component.
    """
    if config.ensemble.kind != "gate_count":
        raise ValidationError("gate-count experiment takes a gate_count ensemble")
    G = config.group
    S = config.ensemble.allowed or G.generator_set
    if S is None:
        raise ValidationError("gate-count experiment needs a generator set")
    n = config.n
    N = config.ensemble.gates
    P = pauli.hermitian_representative(config.perturbation)
    ball = sorted(cgraph.n_ball(P, S, N))
    S_words = [pauli.hermitian_representative(g) for g in S.generators]

    def shallow_one(stream):
        U = _gate_sequence_unitary(S_words, n, N, stream)
        p = pauli_spread_mass(U, P, ball)
        dev = _check_shallow_exactness(p, True)
        return np.array([_finalize(p, stream, config.shot_mode), dev])

    def haar_one(stream):
        U = groups.sample_haar(G, stream)
        return _finalize(pauli_spread_mass(U, P, ball), stream, config.shot_mode)

    p_sh, p_ha, max_dev = _run_two_sided(shallow_one, haar_one, config, threads)
    comp = cgraph.component(P, S)
    analytic = float(bounds.neighborhood_ratio_bound(len(ball), len(comp.members)))
    return _result(config, p_sh, p_ha, max_dev, True, analytic, "gate-count-bound/ball-ratio")
