"""Witness operators certifying non-plastic verdicts.

Both constructions realize a linear map T that sends the ellipsoid onto
itself bijectively (the quadratic form is preserved) while strictly
contracting some direction, so T cannot be an isometry.

* ShiftWitness: a weighted bilateral shift on eigenvectors e_{n_k},
  T e_{n_k} = sqrt(lambda_{n_k}/lambda_{n_{k-1}}) e_{n_{k-1}}, identity off
  the chain.  The lambda chain decreases across k with a strict drop at
  k = 1, so the junction factor is < 1.

* TransportWitness: for a continuous spectral part, a bilateral quantile
  partition {Delta_k} of the support, per-cell transport maps
  G_k : Delta_{k+1} -> Delta_k, and multipliers
  g_hat_k(s) = sqrt(s / G_k^{-1}(s)) < 1 on Delta_k.  The cell map is
  (Tf)(t) = sqrt(G_k(t)/t) * f(G_k(t)) * sqrt(M_k/M_{k+1}) on Delta_{k+1}.

Truncation semantics: the true operators are bilateral; at window size K the
top chain slot (k = K for the shift, the last cell for the transport) has no
in-window preimage, so bijectivity probes must restrict supports accordingly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, PreconditionError, RangeError
from .measures import MeasureSpec, RestrictedMeasure, TransportMap, quadrature_nodes, transport_map
from .plasticity import Rule, ViolationCertificate
from .spectrum import ContinuousPart, EigenSequence, SpectralDescriptor

#: Basis label: (component kind, component index, ordinal or term index).
BasisLabel = tuple[str, int, int]


@dataclass(frozen=True, eq=False)
class ShiftWitness:
    """Weighted bilateral shift on the eigenvector chain e_{n_k}, |k| <= K."""

    window: int
    lambdas: np.ndarray  # position k + window holds lambda_{n_k}
    basis_labels: tuple[BasisLabel, ...]
    r: float
    R: float
    rule: Rule
    factors: np.ndarray = field(init=False)  # position k + window - 1 holds factor(k)

    def __post_init__(self):
        K = self.window
        lam = np.asarray(self.lambdas, dtype=float)
        object.__setattr__(self, "lambdas", lam)
        if K < 1 or lam.shape != (2 * K + 1,):
            raise PreconditionError("lambda chain must cover k = -K..K")
        if not (lam > 0).all():
            raise PreconditionError("eigenvalues must be positive")
        if not (np.diff(lam) <= 0).all():
            raise PreconditionError("lambda chain must be non-increasing in k")
        if not lam[K + 1] < lam[K]:
            raise PreconditionError("the junction drop lambda_{n_1} < lambda_{n_0} failed")
        if not (lam[K + 1 :] < 0.5 * (self.r + self.R)).all():
            raise PreconditionError("forward chain must stay below (r + R)/2")
        if len(set(self.basis_labels)) != len(self.basis_labels) or len(
            self.basis_labels
        ) != len(lam):
            raise PreconditionError("basis labels must be distinct, one per chain slot")
        object.__setattr__(self, "factors", np.sqrt(lam[1:] / lam[:-1]))

    def factor(self, k: int) -> float:
        """sqrt(lambda_{n_k}/lambda_{n_{k-1}}) for k in -K+1..K."""
        if not -self.window + 1 <= k <= self.window:
            raise RangeError(f"factor index {k} outside window")
        return float(self.factors[k + self.window - 1])

    def apply(self, window_coeffs, tail=None):
        """Shift window coefficients down one slot; tail is untouched.

        Slot k = K receives 0: its in-chain source sits outside the window.
        """
        x = np.asarray(window_coeffs, dtype=float)
        if x.shape != self.lambdas.shape:
            raise RangeError("coefficient vector must cover k = -K..K")
        out = np.zeros_like(x)
        out[:-1] = self.factors * x[1:]
        return (out, tail) if tail is not None else out

    def form(self, window_coeffs) -> float:
        """Quadratic form <x, Ax> of window coefficients."""
        x = np.asarray(window_coeffs, dtype=float)
        return float(np.sum(self.lambdas * x * x))

    def form_of_image(self, window_coeffs) -> float:
        """<Tx, ATx> evaluated with exact eigenvalue ratios.

        Uses lambda_{n_{k-1}} * (lambda_{n_k}/lambda_{n_{k-1}}) per slot, not
        the rounded square of factor(k), so the preservation identity holds
        to machine precision.
        """
        x = np.asarray(window_coeffs, dtype=float)
        ratios = self.lambdas[1:] / self.lambdas[:-1]
        return float(np.sum(self.lambdas[:-1] * ratios * x[1:] * x[1:]))


def _first_geometric_index(seq: EigenSequence, threshold: float) -> int:
    """Smallest j >= 1 with offset * ratio**j < threshold."""
    if not threshold > 0:
        raise CapacityError("sequence cannot reach the requested side")
    estimate = max(1, math.floor(math.log(threshold / seq.offset) / math.log(seq.ratio)))
    j = max(1, estimate - 2)
    while not seq.offset * seq.ratio**j < threshold:
        j += 1
    while j > 1 and seq.offset * seq.ratio ** (j - 1) < threshold:
        j -= 1
    return j


def build_shift_witness(
    d: SpectralDescriptor, cert: ViolationCertificate, K: int
) -> ShiftWitness:
    """Populate the lambda chain for an eigenvalue-rule certificate.

    Backward slots (k <= 0) climb toward R, forward slots (k >= 1) descend
    toward r; sequence terms are taken earliest-first subject to the strict
    inequalities, atoms of infinite multiplicity supply distinct ordinals.
    """
    if K < 1:
        raise PreconditionError(f"window must be >= 1, got {K}")
    if cert.rule is Rule.CONTINUOUS:
        raise PreconditionError("continuous certificates take the transport witness")

    back = np.empty(K + 1)  # k = -K..0, stored ascending in k
    fwd = np.empty(K)  # k = 1..K
    back_labels: list[BasisLabel] = []
    fwd_labels: list[BasisLabel] = []

    def atom_side(index: int, value: float, count: int, side: list, arr: np.ndarray):
        atom = d.atoms[index]
        if not atom.is_infinite and count > atom.multiplicity:
            raise CapacityError(
                f"eigenspace at {value} holds {atom.multiplicity} vectors, "
                f"needs {count}"
            )
        arr[:] = value
        side.extend(("atom", index, ordinal) for ordinal in range(count))

    def sequence_side(index: int, first_j: int, count: int, side: list, arr, ascending):
        seq = d.sequences[index]
        terms = seq.terms(count, first=first_j)
        arr[:] = terms[::-1] if ascending else terms
        js = range(first_j, first_j + count)
        side.extend(("sequence", index, j) for j in (reversed(js) if ascending else js))

    if cert.rule is Rule.TWO_INFINITE_ATOMS:
        atom_side(cert.components[1][1], cert.R, K + 1, back_labels, back)
        atom_side(cert.components[0][1], cert.r, K, fwd_labels, fwd)
        back_labels.reverse()  # ordinals ascend as k decreases
    elif cert.rule is Rule.INFINITE_MIN_NO_MAX:
        i_atom = cert.components[0][1]
        j_seq = cert.components[1][1]
        seq = d.sequences[j_seq]
        j0 = _first_geometric_index(seq, seq.limit - cert.r)  # terms above the atom
        sequence_side(j_seq, j0, K + 1, back_labels, back, ascending=True)
        atom_side(i_atom, cert.r, K, fwd_labels, fwd)
    elif cert.rule is Rule.NO_MIN_INFINITE_MAX:
        j_seq = cert.components[0][1]
        i_atom = cert.components[1][1]
        seq = d.sequences[j_seq]
        mid = 0.5 * (cert.r + cert.R)
        j0 = _first_geometric_index(seq, mid - seq.limit)  # terms below midpoint
        atom_side(i_atom, cert.R, K + 1, back_labels, back)
        back_labels.reverse()
        sequence_side(j_seq, j0, K, fwd_labels, fwd, ascending=False)
    elif cert.rule is Rule.NO_MIN_NO_MAX:
        j_dec = cert.components[0][1]
        j_inc = cert.components[1][1]
        seq_dec, seq_inc = d.sequences[j_dec], d.sequences[j_inc]
        mid = 0.5 * (cert.r + cert.R)
        j0_dec = _first_geometric_index(seq_dec, mid - seq_dec.limit)
        sequence_side(j_dec, j0_dec, K, fwd_labels, fwd, ascending=False)
        lambda_1 = fwd[0]
        j0_inc = _first_geometric_index(seq_inc, seq_inc.limit - lambda_1)
        sequence_side(j_inc, j0_inc, K + 1, back_labels, back, ascending=True)
    else:  # pragma: no cover
        raise PreconditionError(f"unknown rule {cert.rule}")

    lambdas = np.concatenate([back, fwd])
    labels = tuple(back_labels + fwd_labels)
    return ShiftWitness(
        window=K, lambdas=lambdas, basis_labels=labels, r=cert.r, R=cert.R, rule=cert.rule
    )


def apply_shift(w: ShiftWitness, window_coeffs, tail=None):
    return w.apply(window_coeffs, tail)


# ---------------------------------------------------------------------------
# Transport witness
# ---------------------------------------------------------------------------

def partition_levels(K: int) -> np.ndarray:
    """Cumulative levels s_k, k = -K..K: 2**(k-1) below, 1 - 2**(-k-1) above.

    s_0 = 1/2, s_1 = 3/4; the bilateral limits are 0 and 1, so every cell
    keeps a fixed fraction of the total mass regardless of density gaps.
    """
    k = np.arange(-K, K + 1)
    return np.where(k <= 0, 2.0 ** (k - 1.0), 1.0 - 2.0 ** (-k - 1.0))


def build_partition(m: MeasureSpec | RestrictedMeasure, K: int) -> np.ndarray:
    """Quantile partition endpoints a_k = quantile(M * s_k), k = -K..K."""
    if K < 1:
        raise PreconditionError(f"window must be >= 1, got {K}")
    return m.quantile(m.total_mass * partition_levels(K))


@dataclass(frozen=True, eq=False)
class TransportWitness:
    """Measure-transport witness over a bilateral quantile partition.

    Cells Delta_k = [a_k, a_{k+1}) for k = -K..K-1; maps[k] is
    G_k = G_{mu_k, mu_{k+1}} : Delta_{k+1} -> Delta_k for k = -K..K-2.
    """

    measure: MeasureSpec
    window: int
    endpoints: np.ndarray
    cells: tuple[RestrictedMeasure, ...] = field(init=False)
    masses: np.ndarray = field(init=False)
    maps: tuple[TransportMap, ...] = field(init=False)

    def __post_init__(self):
        K = self.window
        pts = np.asarray(self.endpoints, dtype=float)
        object.__setattr__(self, "endpoints", pts)
        if K < 1 or pts.shape != (2 * K + 1,):
            raise PreconditionError("endpoints must cover k = -K..K")
        if not (np.diff(pts) > 0).all():
            raise PreconditionError("partition endpoints must increase strictly")
        cells = tuple(
            self.measure.restrict(pts[p], pts[p + 1]) for p in range(2 * K)
        )
        object.__setattr__(self, "cells", cells)
        object.__setattr__(
            self, "masses", np.array([cell.total_mass for cell in cells])
        )
        object.__setattr__(
            self,
            "maps",
            tuple(transport_map(cells[p], cells[p + 1]) for p in range(2 * K - 1)),
        )

    def _cell_pos(self, k: int, need_successor: bool = False) -> int:
        hi = self.window - (2 if need_successor else 1)
        if not -self.window <= k <= hi:
            raise RangeError(f"cell index {k} outside window")
        return k + self.window

    def cell(self, k: int) -> RestrictedMeasure:
        return self.cells[self._cell_pos(k)]

    def cell_mass(self, k: int) -> float:
        return float(self.masses[self._cell_pos(k)])

    def map(self, k: int) -> TransportMap:
        """G_k : Delta_{k+1} -> Delta_k."""
        return self.maps[self._cell_pos(k, need_successor=True)]

    def multiplier_squared(self, k: int, s):
        """g_hat_k(s)^2 = s / G_k^{-1}(s) on the closed cell Delta_k."""
        p = self._cell_pos(k, need_successor=True)
        s = np.asarray(s, dtype=float)
        lo, hi = self.cells[p].support
        if (s < lo).any() or (s > hi).any():
            raise RangeError(f"multiplier argument outside cell {k}")
        return s / self.maps[p].inverse(s)

    def multiplier(self, k: int, s):
        return np.sqrt(self.multiplier_squared(k, s))

    def apply(self, f_values, k: int, nodes=None):
        """Transport node samples on Delta_k to the matching nodes of Delta_{k+1}.

        Inverse-transform nodes of adjacent cells sit at the same relative
        mass levels, so G_k carries node i of Delta_{k+1} onto node i of
        Delta_k (up to quantile tolerance); the input samples line up by
        index while the multiplier is evaluated through the transport map.
        """
        f_values = np.asarray(f_values, dtype=float)
        p = self._cell_pos(k, need_successor=True)
        target = self.cells[p + 1]
        if nodes is None:
            nodes, _ = quadrature_nodes(target, None, f_values.size)
        else:
            nodes = np.asarray(nodes, dtype=float)
            if nodes.size != f_values.size:
                raise RangeError("node and sample counts differ")
            lo, hi = target.support
            if (nodes < lo).any() or (nodes > hi).any():
                raise RangeError(f"node outside cell {k + 1}")
        pulled_back = self.maps[p](nodes)
        mass_ratio = self.masses[p] / self.masses[p + 1]
        return np.sqrt(pulled_back / nodes) * math.sqrt(mass_ratio) * f_values


def build_transport_witness(part: ContinuousPart, K: int) -> TransportWitness:
    """Partition the part's measure and wire up per-cell transports."""
    m = MeasureSpec((part,))
    endpoints = build_partition(m, K)
    return TransportWitness(measure=m, window=K, endpoints=endpoints)


def apply_transport(w: TransportWitness, f_values, k: int, nodes=None):
    return w.apply(f_values, k, nodes)


# ---------------------------------------------------------------------------
# Serialization (report JSON)
# ---------------------------------------------------------------------------

def shift_witness_to_dict(w: ShiftWitness) -> dict:
    return {
        "type": "shift",
        "rule": w.rule.value,
        "window": w.window,
        "r": w.r,
        "R": w.R,
        "lambdas": [float(v) for v in w.lambdas],
        "factors": [float(v) for v in w.factors],
        "basis_labels": [list(label) for label in w.basis_labels],
    }


def transport_witness_to_dict(
    w: TransportWitness, full: bool = False, multiplier_nodes: int = 33
) -> dict:
    doc = {
        "type": "transport",
        "window": w.window,
        "support": list(w.measure.support),
        "total_mass": w.measure.total_mass,
        "endpoints": [float(v) for v in w.endpoints],
        "masses": [float(v) for v in w.masses],
    }
    if full:
        tables = []
        for k in range(-w.window, w.window - 1):
            lo, hi = w.cell(k).support
            s = np.linspace(lo, hi, multiplier_nodes)
            tables.append(
                {
                    "cell": k,
                    "nodes": [float(v) for v in s],
                    "multiplier": [float(v) for v in w.multiplier(k, s)],
                }
            )
        doc["multiplier_tables"] = tables
    return doc


def witness_to_dict(w, full: bool = False) -> dict:
    if isinstance(w, ShiftWitness):
        return shift_witness_to_dict(w)
    return transport_witness_to_dict(w, full=full)
