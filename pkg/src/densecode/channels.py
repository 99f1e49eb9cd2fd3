"""Covariant noisy channels: joint Pauli channels with pairwise correlation
degrees, depolarizing and fully-correlated special cases, Kraus-form CPTP
maps, and a numerical covariance certifier.

A joint Pauli channel randomly conjugates the state by a tensor product of
displacement operators, one per affected party.  The joint probability tensor
is indexed per party by the flattened label ``l = m*d + n``.  ``acts_on``
assigns each party to a layout slot; several parties may share one slot, in
which case they tile it in party order (this is how a merged
product-dimension receiver slot hosts the b_1..b_k parties).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .displacement import displacement_op
from .errors import (
    ChannelError,
    LayoutError,
    NumericalError,
    ParameterError,
    ProbabilityError,
    SizeLimitError,
)
from .linalg import (
    SubsystemLayout,
    as_complex_matrix,
    kron_all,
    permute_slots,
    random_density_matrix,
)

JOINT_TENSOR_CAP = 16_000_000  # dense entries
CORRELATION_PAIR_CAP = 15      # subset expansion is 2^pairs

# sigma_0..sigma_3 expressed as displacement labels l = m*2 + n (conjugation
# by V_11 = -i*sigma_2 equals conjugation by sigma_2).
PAULI_TO_LABEL = (0, 2, 3, 1)


@dataclass(frozen=True, eq=False)
class SinglePartyPauliSpec:
    """Probability table q_mn for one use of a d-dimensional Pauli channel."""

    d: int
    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        if q.shape != (self.d, self.d):
            raise ProbabilityError(f"q table must be {self.d}x{self.d}, got {q.shape}")
        if q.min() < 0:
            raise ProbabilityError(f"negative channel probability {q.min()!r}")
        if abs(q.sum() - 1.0) > 1e-12:
            raise ProbabilityError(f"channel probabilities sum to {q.sum()!r}")
        q.setflags(write=False)
        object.__setattr__(self, "q", q)


@dataclass(frozen=True, eq=False)
class CorrelationSpec:
    """Pairwise correlation degrees mu_jl for a given number of parties.

    Stored as a symmetric ``parties x parties`` matrix with zero diagonal;
    entry (j, l) correlates channel use j with channel use l.
    """

    mu: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        if mu.ndim != 2 or mu.shape[0] != mu.shape[1]:
            raise ParameterError(f"mu must be square, got shape {mu.shape}")
        if np.abs(mu - mu.T).max() > 0:
            raise ParameterError("mu must be symmetric")
        if np.abs(np.diag(mu)).max() > 0:
            raise ParameterError("mu diagonal must be zero")
        if mu.min() < 0 or mu.max() > 1:
            raise ParameterError("correlation degrees must lie in [0, 1]")
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)

    @property
    def parties(self) -> int:
        return self.mu.shape[0]

    @classmethod
    def uniform(cls, parties: int, value: float) -> "CorrelationSpec":
        mu = np.full((parties, parties), float(value))
        np.fill_diagonal(mu, 0.0)
        return cls(mu)


@dataclass(frozen=True, eq=False)
class PauliChannelSpec:
    """Joint Pauli channel: probability tensor over per-party labels.

    ``joint`` has one axis of length d_i^2 per party; ``acts_on[i]`` is the
    layout slot party i conjugates.
    """

    party_dims: tuple[int, ...]
    joint: np.ndarray
    acts_on: tuple[int, ...]

    def __post_init__(self):
        party_dims = tuple(int(d) for d in self.party_dims)
        acts_on = tuple(int(s) for s in self.acts_on)
        joint = np.asarray(self.joint, dtype=float)
        expected = tuple(d * d for d in party_dims)
        if joint.shape != expected:
            raise ProbabilityError(
                f"joint tensor shape {joint.shape} does not match {expected}"
            )
        if joint.size > JOINT_TENSOR_CAP:
            raise SizeLimitError(f"joint tensor has {joint.size} entries")
        if len(acts_on) != len(party_dims):
            raise LayoutError("need one slot index per party")
        if joint.min() < 0:
            raise ProbabilityError(f"negative joint probability {joint.min()!r}")
        if abs(joint.sum() - 1.0) > 1e-10:
            raise ProbabilityError(f"joint tensor sums to {joint.sum()!r}")
        joint.setflags(write=False)
        object.__setattr__(self, "party_dims", party_dims)
        object.__setattr__(self, "acts_on", acts_on)
        object.__setattr__(self, "joint", joint)

    @property
    def parties(self) -> int:
        return len(self.party_dims)

    def with_acts_on(self, acts_on: Sequence[int]) -> "PauliChannelSpec":
        return PauliChannelSpec(self.party_dims, self.joint, tuple(acts_on))


@dataclass(frozen=True, eq=False)
class CptpMap:
    """Kraus representation of a completely positive trace-preserving map."""

    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not self.kraus:
            raise ChannelError("need at least one Kraus operator")
        ops = tuple(as_complex_matrix(k, "kraus") for k in self.kraus)
        shape = ops[0].shape
        if any(k.shape != shape for k in ops):
            raise ChannelError("all Kraus operators must share one shape")
        completeness = sum(k.conj().T @ k for k in ops)
        dev = np.abs(completeness - np.eye(shape[1])).max()
        if dev > 1e-9:
            raise ChannelError(f"Kraus completeness violated by {dev:.3e}")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "kraus", ops)

    @property
    def in_dim(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.kraus[0].shape[0]


def depolarizing_probs(d: int, p: float) -> SinglePartyPauliSpec:
    """Single-party table for a d-dimensional depolarizing channel.

    q_00 = 1 - p + p/d^2 and q_mn = p/d^2 otherwise.
    """
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"noise strength must be in [0, 1], got {p}")
    q = np.full((d, d), p / d**2)
    q[0, 0] += 1.0 - p
    return SinglePartyPauliSpec(d, q)


def product_probs(
    singles: Sequence[SinglePartyPauliSpec], acts_on: Sequence[int] | None = None
) -> PauliChannelSpec:
    """Uncorrelated joint channel: outer product of the single-party tables."""
    if not singles:
        raise LayoutError("need at least one party")
    joint = np.array(1.0)
    for s in singles:
        joint = np.multiply.outer(joint, s.q.ravel())
    if acts_on is None:
        acts_on = range(len(singles))
    return PauliChannelSpec(tuple(s.d for s in singles), joint, tuple(acts_on))


def correlated_probs(
    singles: Sequence[SinglePartyPauliSpec],
    corr: CorrelationSpec,
    acts_on: Sequence[int] | None = None,
) -> PauliChannelSpec:
    """Joint tensor of a pairwise-correlated Pauli channel.

    Each subset T of the pair set contributes weight
    prod_{e in T} mu_e * prod_{e not in T} (1 - mu_e); labels within every
    connected component of T are forced equal, and the component contributes
    the single-party factor of its lowest-index member.  This reproduces the
    uncorrelated product at mu = 0 and the fully correlated diagonal at
    mu = 1, and sums to one for every mu.
    """
    parties = len(singles)
    if parties < 2:
        raise LayoutError("correlations need at least two parties")
    if corr.parties != parties:
        raise LayoutError(
            f"correlation table is for {corr.parties} parties, got {parties} singles"
        )
    d = singles[0].d
    if any(s.d != d for s in singles):
        raise LayoutError("correlated parties must share one dimension")
    n_labels = d * d
    if n_labels ** parties > JOINT_TENSOR_CAP:
        raise SizeLimitError(f"joint tensor would have {n_labels ** parties} entries")
    pairs = [(j, l) for j in range(parties) for l in range(j + 1, parties)]
    if len(pairs) > CORRELATION_PAIR_CAP:
        raise SizeLimitError(
            f"{len(pairs)} correlation pairs exceed cap {CORRELATION_PAIR_CAP}"
        )
    mus = np.array([corr.mu[j, l] for j, l in pairs])
    tables = [s.q.ravel() for s in singles]

    joint = np.zeros((n_labels,) * parties)
    for on_mask in itertools.product((False, True), repeat=len(pairs)):
        weight = 1.0
        for on, mu in zip(on_mask, mus):
            weight *= mu if on else 1.0 - mu
        if weight == 0.0:
            continue
        component = _connected_components(parties, pairs, on_mask)
        roots = sorted(set(component))
        for labels in itertools.product(range(n_labels), repeat=len(roots)):
            term = weight
            for root, lab in zip(roots, labels):
                term *= tables[root][lab]
            if term == 0.0:
                continue
            by_root = dict(zip(roots, labels))
            idx = tuple(by_root[component[party]] for party in range(parties))
            joint[idx] += term
    if acts_on is None:
        acts_on = range(parties)
    return PauliChannelSpec((d,) * parties, joint, tuple(acts_on))


def _connected_components(parties, pairs, on_mask) -> list[int]:
    """Per-party component root (lowest member index) under the on edges."""
    parent = list(range(parties))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (j, l), on in zip(pairs, on_mask):
        if on:
            a, b = find(j), find(l)
            if a != b:
                parent[max(a, b)] = min(a, b)
    return [find(p) for p in range(parties)]


def fully_correlated_probs(
    parties: int, q: Sequence[float], d: int = 2
) -> PauliChannelSpec:
    """All parties suffer the identical qubit Pauli error, sampled once.

    ``q`` holds the four probabilities in sigma order (identity, sigma_1,
    sigma_2, sigma_3).
    """
    if d != 2:
        raise ParameterError("fully correlated construction is defined for d=2")
    if parties < 1:
        raise ParameterError(f"need at least one party, got {parties}")
    q = np.asarray(q, dtype=float)
    if q.shape != (4,):
        raise ProbabilityError(f"need 4 probabilities, got shape {q.shape}")
    if q.min() < 0 or abs(q.sum() - 1.0) > 1e-12:
        raise ProbabilityError(f"invalid probability vector {q!r}")
    if 4 ** parties > JOINT_TENSOR_CAP:
        raise SizeLimitError(f"joint tensor would have {4 ** parties} entries")
    joint = np.zeros((4,) * parties)
    for sigma, prob in enumerate(q):
        label = PAULI_TO_LABEL[sigma]
        joint[(label,) * parties] = prob
    return PauliChannelSpec((2,) * parties, joint, tuple(range(parties)))


def _slot_assignment(spec: PauliChannelSpec, layout: SubsystemLayout) -> list[list[int]]:
    """Parties grouped per layout slot, validated against the slot dims."""
    dims = layout.dims
    per_slot: list[list[int]] = [[] for _ in dims]
    for party, slot in enumerate(spec.acts_on):
        if not 0 <= slot < len(dims):
            raise LayoutError(f"acts_on slot {slot} out of range for {len(dims)} slots")
        per_slot[slot].append(party)
    for slot, members in enumerate(per_slot):
        if members:
            tile = math.prod(spec.party_dims[p] for p in members)
            if tile != dims[slot]:
                raise LayoutError(
                    f"parties {members} tile dimension {tile}, slot {slot} has {dims[slot]}"
                )
    return per_slot


def _pauli_term_ops(spec: PauliChannelSpec, layout: SubsystemLayout):
    """Cached (probabilities, stacked full-space unitaries) of nonzero terms."""
    cache = getattr(spec, "_term_cache", None)
    if cache is None:
        cache = {}
        object.__setattr__(spec, "_term_cache", cache)
    key = layout.dims
    if key in cache:
        return cache[key]

    per_slot = _slot_assignment(spec, layout)
    dims = layout.dims
    eyes = [np.eye(d, dtype=complex) for d in dims]
    probs = []
    ops = []
    for idx in np.argwhere(spec.joint > 0.0):
        probs.append(float(spec.joint[tuple(idx)]))
        party_ops = [
            displacement_op(spec.party_dims[p], int(l) // spec.party_dims[p],
                            int(l) % spec.party_dims[p])
            for p, l in enumerate(idx)
        ]
        slot_ops = []
        for slot in range(len(dims)):
            members = per_slot[slot]
            if members:
                slot_ops.append(kron_all([party_ops[p] for p in members]))
            else:
                slot_ops.append(eyes[slot])
        ops.append(kron_all(slot_ops))
    # Flattened layouts so application is two BLAS products:
    # out_ij = sum_{t,k} q_t (ops rho)[t,i,k] conj(ops)[t,j,k].
    stack = np.stack(ops)
    total = layout.total_dim
    flat = np.ascontiguousarray(stack.reshape(len(ops) * total, total))
    bra = np.ascontiguousarray(
        stack.conj().transpose(1, 0, 2).reshape(total, len(ops) * total)
    )
    cached = (np.asarray(probs), stack, flat, bra)
    cache[key] = cached
    return cached


def apply_pauli(
    spec: PauliChannelSpec, rho, layout: SubsystemLayout
) -> np.ndarray:
    """Apply the joint Pauli channel; zero-probability terms are skipped.

    Each term conjugates by its own full-space unitary (no Choi matrix is
    formed); the per-term operators are cached on the channel object.
    """
    rho = as_complex_matrix(rho, "rho")
    if rho.shape != (layout.total_dim, layout.total_dim):
        raise LayoutError(
            f"state dim {rho.shape[0]} does not match layout total {layout.total_dim}"
        )
    probs, _, flat, bra = _pauli_term_ops(spec, layout)
    total = layout.total_dim
    rotated = (flat @ rho).reshape(len(probs), total, total)
    weighted = (rotated * probs[:, None, None]).transpose(1, 0, 2).reshape(
        total, len(probs) * total
    )
    out = weighted @ bra.T
    trace_dev = abs(out.trace() - rho.trace())
    if trace_dev > 1e-10:
        raise NumericalError(f"channel failed to preserve trace by {trace_dev:.3e}")
    return out


def embed_operator(op, slots: Sequence[int], layout: SubsystemLayout) -> np.ndarray:
    """Extend an operator on the given slots by identity on the rest."""
    dims = layout.dims
    n = len(dims)
    slots = [int(s) for s in slots]
    if len(set(slots)) != len(slots):
        raise LayoutError(f"duplicate slots in {slots}")
    if any(not 0 <= s < n for s in slots):
        raise LayoutError(f"slots {slots} out of range for {n} slots")
    op = as_complex_matrix(op, "op")
    sel_dim = math.prod(dims[s] for s in slots)
    if op.shape != (sel_dim, sel_dim):
        raise LayoutError(f"operator shape {op.shape} does not match slots {slots}")
    rest = [s for s in range(n) if s not in slots]
    rest_dim = math.prod(dims[s] for s in rest) if rest else 1
    big = np.kron(op, np.eye(rest_dim, dtype=complex))
    current = slots + rest  # slot order big currently acts in
    perm = [current.index(s) for s in range(n)]
    return permute_slots(big, [dims[s] for s in current], perm)


def apply_cptp(
    cptp: CptpMap, rho, slots: Sequence[int], layout: SubsystemLayout
) -> np.ndarray:
    """Apply a Kraus map on the chosen slots, identity elsewhere."""
    rho = as_complex_matrix(rho, "rho")
    if cptp.in_dim != cptp.out_dim:
        raise LayoutError("embedded Kraus maps must preserve the slot dimension")
    out = np.zeros_like(rho)
    for k in cptp.kraus:
        full = embed_operator(k, slots, layout)
        out += full @ rho @ full.conj().T
    trace_dev = abs(out.trace() - rho.trace())
    if trace_dev > 1e-9:
        raise NumericalError(f"CPTP map failed to preserve trace by {trace_dev:.3e}")
    return out


def pauli_kraus(spec: PauliChannelSpec) -> CptpMap:
    """Kraus view {sqrt(q) V x ... x V} on the parties in party order."""
    ops = []
    for idx in np.argwhere(spec.joint > 0.0):
        prob = float(spec.joint[tuple(idx)])
        factors = [
            displacement_op(spec.party_dims[p], int(l) // spec.party_dims[p],
                            int(l) % spec.party_dims[p])
            for p, l in enumerate(idx)
        ]
        ops.append(np.sqrt(prob) * kron_all(factors))
    return CptpMap(tuple(ops))


def apply_channel(channel, rho, layout: SubsystemLayout) -> np.ndarray:
    """Dispatch: joint Pauli spec, or a CPTP map on the full space."""
    if isinstance(channel, PauliChannelSpec):
        return apply_pauli(channel, rho, layout)
    if isinstance(channel, CptpMap):
        return apply_cptp(channel, rho, range(len(layout.dims)), layout)
    raise ChannelError(f"unsupported channel type {type(channel).__name__}")


def verify_covariance(
    spec,
    enc_set,
    layout: SubsystemLayout,
    trials: int = 20,
    seed: int = 0,
) -> float:
    """Max deviation of the covariance property over random states.

    Checks Lambda(V rho V^dag) = V Lambda(rho) V^dag for every operator in
    the encoding set (extended by identity on the receiver slot).  Accepts a
    Pauli spec or any full-space CPTP map.
    """
    rng = np.random.default_rng(seed)
    eye_b = np.eye(layout.receiver_dim, dtype=complex)
    worst = 0.0
    for _ in range(trials):
        rho = random_density_matrix(layout.total_dim, rng)
        out = apply_channel(spec, rho, layout)
        for v in enc_set.operators:
            v_full = np.kron(v, eye_b)
            lhs = apply_channel(spec, v_full @ rho @ v_full.conj().T, layout)
            rhs = v_full @ out @ v_full.conj().T
            worst = max(worst, np.abs(lhs - rhs).max())
    return worst


def channel_to_json(spec: PauliChannelSpec) -> dict:
    """JSON document for a joint Pauli channel (canonical joint form)."""
    return {
        "party_dims": list(spec.party_dims),
        "acts_on": list(spec.acts_on),
        "shape": list(spec.joint.shape),
        "joint": [float(x) for x in spec.joint.ravel()],
    }


def channel_from_json(doc: dict) -> PauliChannelSpec:
    """Parse either the joint form or the singles+mu correlated form.

    Joint form: ``{"party_dims", "joint", "shape", "acts_on"?}``.
    Correlated form: ``{"parties", "d", "singles", "mu", "acts_on"?}`` where
    ``singles`` is one d x d table per party and ``mu`` the symmetric
    correlation matrix.
    """
    if "joint" in doc:
        party_dims = tuple(int(d) for d in doc["party_dims"])
        joint = np.asarray(doc["joint"], dtype=float).reshape(
            tuple(int(s) for s in doc["shape"])
        )
        acts_on = doc.get("acts_on", list(range(len(party_dims))))
        return PauliChannelSpec(party_dims, joint, tuple(acts_on))
    parties = int(doc["parties"])
    d = int(doc["d"])
    singles = [SinglePartyPauliSpec(d, np.asarray(t, dtype=float)) for t in doc["singles"]]
    if len(singles) != parties:
        raise ChannelError(f"expected {parties} singles tables, got {len(singles)}")
    corr = CorrelationSpec(np.asarray(doc["mu"], dtype=float))
    acts_on = doc.get("acts_on")
    return correlated_probs(singles, corr, acts_on)
