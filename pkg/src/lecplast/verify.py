"""Numerical verification of witness and spectral-bound properties.

Every check is deterministic given (inputs, seed, node counts): sampling
runs on a counter-based Philox generator keyed by the check's seed, so
independent checks can run concurrently without changing results.

Shift-witness identities are exact-arithmetic paths (thresholds 1e-12);
transport identities go through quadrature (1e-5 for densities, 1e-3 when a
Cantor part participates).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractionFailure, PreconditionError
from .measures import quadrature_nodes
from .spectrum import PartKind, SpectralDescriptor, enumerate_points
from .witness import ShiftWitness, TransportWitness

SHIFT_TOL = 1e-12
DENSITY_TOL = 1e-5
CANTOR_TOL = 1e-3
CONTRACTION_MARGIN = 1e-6
SPACE_TOL = 1e-12
OPERATOR_TOL = 1e-8
#: Acceptance band for contraction candidates: ||T|| <= 1 + this.
NORM_SLACK = 1e-10


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


@dataclass(frozen=True)
class VerificationReport:
    name: str
    samples: int
    worst_residual: float
    threshold: float
    passed: bool
    seed: int

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "samples": self.samples,
            "worst_residual": self.worst_residual,
            "threshold": self.threshold,
            "pass": self.passed,
            "seed": self.seed,
        }


def _report(name, samples, worst, threshold, seed) -> VerificationReport:
    worst = float(worst)
    return VerificationReport(name, samples, worst, threshold, worst <= threshold, seed)


# ---------------------------------------------------------------------------
# Truncated quadratic-form space
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TruncatedQuadraticSpace:
    """Diagonal model of <x, Ax> on a finite eigenvalue truncation.

    Houses the ellipsoid E = {q(x) <= 1}, its boundary S, the modified
    product <x, Ay> and the index groups Ker(A - t).
    """

    points: tuple[tuple[float, int], ...]
    lambdas: np.ndarray = field(init=False)

    def __post_init__(self):
        pts = tuple((float(v), int(m)) for v, m in self.points)
        if not pts:
            raise PreconditionError("the truncation is empty")
        if any(v <= 0 or m < 1 for v, m in pts):
            raise PreconditionError("eigenvalues must be positive with multiplicity >= 1")
        object.__setattr__(self, "points", pts)
        lam = np.repeat([v for v, _ in pts], [m for _, m in pts]).astype(float)
        object.__setattr__(self, "lambdas", lam)

    @classmethod
    def from_descriptor(
        cls, d: SpectralDescriptor, per_sequence: int = 8, replication: int | None = None
    ) -> "TruncatedQuadraticSpace":
        return cls(tuple(enumerate_points(d, per_sequence, replication)))

    @property
    def dimension(self) -> int:
        return self.lambdas.size

    def form(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(np.sum(self.lambdas * x * x))

    def modified_inner(self, x, y) -> float:
        return float(np.sum(self.lambdas * np.asarray(x) * np.asarray(y)))

    def modified_norm(self, x) -> float:
        return self.form(x) ** 0.5

    def in_ellipsoid(self, x) -> bool:
        return self.form(x) <= 1.0

    def on_boundary(self, x, tol: float = 1e-12) -> bool:
        return abs(self.form(x) - 1.0) <= tol

    def group(self, value: float) -> np.ndarray:
        return np.nonzero(self.lambdas == value)[0]


# ---------------------------------------------------------------------------
# Witness checks
# ---------------------------------------------------------------------------

def _transport_tol(w: TransportWitness) -> float:
    cantor = any(p.kind is PartKind.CANTOR for p in w.measure.parts)
    return CANTOR_TOL if cantor else DENSITY_TOL


class _TransportTables:
    """Per-cell quadrature data shared by the transport checks.

    For each source cell k (all cells with a successor): its own nodes,
    the successor's nodes, and the transported successor nodes G_k(t) with
    the squared multiplier G_k(t)/t evaluated along the way.
    """

    def __init__(self, w: TransportWitness, nodes: int):
        K = w.window
        self.cell_count = 2 * K - 1
        self.src_nodes, self.src_du = [], []
        self.img_nodes, self.img_du = [], []
        self.pulled, self.gsq, self.mass_ratio = [], [], []
        for p in range(self.cell_count):
            s, du_s = quadrature_nodes(w.cells[p], None, nodes)
            t, du_t = quadrature_nodes(w.cells[p + 1], None, nodes)
            g = w.maps[p](t)
            self.src_nodes.append(s)
            self.src_du.append(du_s)
            self.img_nodes.append(t)
            self.img_du.append(du_t)
            self.pulled.append(g)
            self.gsq.append(g / t)
            self.mass_ratio.append(w.masses[p] / w.masses[p + 1])

    def random_functions(self, rng, degree: int = 3):
        """One random polynomial per source cell, in cell-local coordinates."""
        funcs = []
        for p in range(self.cell_count):
            coeffs = rng.normal(size=degree + 1)
            lo = self.src_nodes[p][0]
            span = self.src_nodes[p][-1] - lo

            def f(t, coeffs=coeffs, lo=lo, span=span):
                return np.polynomial.polynomial.polyval((t - lo) / span, coeffs)

            funcs.append(f)
        return funcs

    def form_of(self, funcs) -> float:
        return sum(
            self.src_du[p] * float(np.sum(self.src_nodes[p] * funcs[p](self.src_nodes[p]) ** 2))
            for p in range(self.cell_count)
        )

    def form_of_image(self, funcs) -> float:
        return sum(
            self.img_du[p]
            * self.mass_ratio[p]
            * float(np.sum(self.img_nodes[p] * self.gsq[p] * funcs[p](self.pulled[p]) ** 2))
            for p in range(self.cell_count)
        )

    def norm_sq_of(self, funcs) -> float:
        return sum(
            self.src_du[p] * float(np.sum(funcs[p](self.src_nodes[p]) ** 2))
            for p in range(self.cell_count)
        )

    def norm_sq_of_image(self, funcs) -> float:
        return sum(
            self.img_du[p]
            * self.mass_ratio[p]
            * float(np.sum(self.gsq[p] * funcs[p](self.pulled[p]) ** 2))
            for p in range(self.cell_count)
        )


def check_form_preservation(
    op: ShiftWitness | TransportWitness,
    samples: int = 200,
    seed: int = 0,
    nodes: int = 4096,
) -> VerificationReport:
    """|q(Tx) - q(x)| over random inputs supported inside the window."""
    rng = _rng(seed)
    worst = 0.0
    if isinstance(op, ShiftWitness):
        for _ in range(samples):
            x = rng.normal(size=op.lambdas.size)
            x[0] = 0.0  # slot k = -K maps outside the window
            x /= np.linalg.norm(x)
            worst = max(worst, abs(op.form_of_image(x) - op.form(x)))
        return _report("form_preservation", samples, worst, SHIFT_TOL, seed)

    tables = _TransportTables(op, nodes)
    for _ in range(samples):
        funcs = tables.random_functions(rng)
        q = tables.form_of(funcs)
        scale = 1.0 / q
        worst = max(worst, abs(tables.form_of_image(funcs) - q) * scale)
    return _report("form_preservation", samples, worst, _transport_tol(op), seed)


def check_nonexpansive(
    op: ShiftWitness | TransportWitness,
    samples: int = 200,
    seed: int = 0,
    nodes: int = 4096,
) -> VerificationReport:
    """(||Tx|| - ||x||)/||x|| over random inputs; shifts also need factors <= 1."""
    rng = _rng(seed)
    worst = -np.inf
    if isinstance(op, ShiftWitness):
        for _ in range(samples):
            x = rng.normal(size=op.lambdas.size)
            norm = np.linalg.norm(x)
            image = op.apply(x)
            worst = max(worst, (np.linalg.norm(image) - norm) / norm)
        worst = max(worst, float(op.factors.max()) - 1.0)
        return _report("nonexpansive", samples, worst, SHIFT_TOL, seed)

    tables = _TransportTables(op, nodes)
    for _ in range(samples):
        funcs = tables.random_functions(rng)
        norm = tables.norm_sq_of(funcs) ** 0.5
        image = tables.norm_sq_of_image(funcs) ** 0.5
        worst = max(worst, (image - norm) / norm)
    return _report("nonexpansive", samples, worst, DENSITY_TOL, seed)


def check_strict_contraction(
    op: ShiftWitness | TransportWitness, nodes: int = 4096, seed: int = 0
) -> VerificationReport:
    """Exhibit a unit direction with ||Tx|| <= 1 - delta, delta >= 1e-6.

    The report's residual is the exhibited contraction factor ||Tx||; the
    threshold 1 - 1e-6 encodes the required margin.  Raises
    ContractionFailure when no direction contracts (a witness bug).
    """
    if isinstance(op, ShiftWitness):
        factor = op.factor(1)  # ||T e_{n_1}||; the junction is the strict drop
    else:
        tables = _TransportTables(op, nodes)
        p0 = op.window  # cell k = 0: indicator direction
        factor = float(np.mean(tables.gsq[p0])) ** 0.5
    if not factor <= 1.0 - CONTRACTION_MARGIN:
        raise ContractionFailure(
            f"no sampled direction contracts by {CONTRACTION_MARGIN} "
            f"(best factor {factor})"
        )
    return _report("strict_contraction", 1, factor, 1.0 - CONTRACTION_MARGIN, seed)


def contraction_delta(report: VerificationReport) -> float:
    """delta = 1 - ||Tx|| recovered from a strict-contraction report."""
    return 1.0 - report.worst_residual


# ---------------------------------------------------------------------------
# Spectral-bound checks (Rayleigh quotients, minimizers)
# ---------------------------------------------------------------------------

def _unit_rows(rng, count: int, dim: int) -> np.ndarray:
    vectors = rng.normal(size=(count, dim))
    return vectors / np.linalg.norm(vectors, axis=1, keepdims=True)


def check_rayleigh_bounds(
    space: TruncatedQuadraticSpace, samples: int = 10_000, seed: int = 0
) -> VerificationReport:
    """No Rayleigh quotient escapes [min lambda, max lambda].

    The sample set always contains the eigenbasis, which witnesses that the
    bounds are attained; for n <= 8 at >= 10^4 samples the sampled extrema
    must additionally approach the bounds within 5% of the spectral width.
    """
    if space.dimension < 1:
        raise PreconditionError("need dimension >= 1")
    rng = _rng(seed)
    lam = space.lambdas
    vectors = np.vstack([_unit_rows(rng, samples, lam.size), np.eye(lam.size)])
    quotients = (vectors * vectors) @ lam
    lo, hi = lam.min(), lam.max()
    worst = max(0.0, lo - quotients.min(), quotients.max() - hi)
    if space.dimension <= 8 and samples >= 10_000 and hi > lo:
        band = 0.05 * (hi - lo)
        worst = max(worst, quotients.min() - (lo + band), (hi - band) - quotients.max())
    return _report("rayleigh_bounds", len(vectors), worst, SPACE_TOL, seed)


def check_min_attained(
    space: TruncatedQuadraticSpace, samples: int = 1000, seed: int = 0
) -> VerificationReport:
    """Minimizers of the Rayleigh quotient are exactly the min-eigenvalue group.

    (a) unit vectors inside the group attain the minimum; (b) any unit vector
    with mass m outside the group exceeds it by at least gap * m, where gap
    is the distance to the second-smallest eigenvalue.
    """
    if space.dimension < 2:
        raise PreconditionError("need dimension >= 2")
    rng = _rng(seed)
    lam = space.lambdas
    lo = lam.min()
    group = space.group(lo)
    worst = 0.0

    inside = np.zeros((samples, lam.size))
    inside[:, group] = _unit_rows(rng, samples, group.size)
    worst = max(worst, np.abs((inside * inside) @ lam - lo).max())

    distinct = np.unique(lam)
    if distinct.size > 1:
        gap = distinct[1] - lo
        mixed = _unit_rows(rng, samples, lam.size)
        quotients = (mixed * mixed) @ lam
        outside_mass = 1.0 - (mixed[:, group] ** 2).sum(axis=1)
        violation = (lo + gap * outside_mass) - quotients
        worst = max(worst, violation.max())
    return _report("min_attained", 2 * samples, worst, SPACE_TOL, seed)


# ---------------------------------------------------------------------------
# Finite-dimensional plasticity surrogate
# ---------------------------------------------------------------------------

def haar_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


def block_orthogonal(lambdas: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Random orthogonal matrix that is block-diagonal w.r.t. eigenvalue groups."""
    lambdas = np.asarray(lambdas, dtype=float)
    u = np.zeros((lambdas.size, lambdas.size))
    for value in np.unique(lambdas):
        idx = np.nonzero(lambdas == value)[0]
        u[np.ix_(idx, idx)] = haar_orthogonal(idx.size, rng)
    return u


def plasticity_map(lambdas, u: np.ndarray) -> np.ndarray:
    """T = A^{-1/2} U A^{1/2} for diagonal A: automatically form-preserving."""
    lam = np.asarray(lambdas, dtype=float)
    return (lam[:, None] ** -0.5) * u * (lam[None, :] ** 0.5)


def operator_norm(matrix: np.ndarray) -> float:
    return float(np.linalg.norm(matrix, 2))


def _random_spectrum(n: int, rng: np.random.Generator) -> np.ndarray:
    if rng.random() < 0.5:
        lam = rng.choice([0.5, 1.0, 1.5, 2.0, 2.5], size=n)  # forces multiplicities
    else:
        lam = rng.uniform(0.5, 2.5, size=n)
    return np.sort(lam)


def check_finite_dim_plasticity(
    n: int, trials: int = 100, seed: int = 0
) -> VerificationReport:
    """Finite-dimensional shadow of ball plasticity for form-preserving maps.

    For sampled T = A^{-1/2} U A^{1/2}: (a) the quadratic form is preserved;
    (b) ||T|| >= 1 (|det T| = 1 forces a singular value >= 1), so no
    form-preserving map is a strict contraction; (c) any T with ||T|| <= 1
    is an isometry; (d) block-diagonal U gives ||T|| = 1.
    """
    if not 2 <= n <= 8:
        raise PreconditionError(f"dimension must be in [2, 8], got {n}")
    rng = _rng(seed)
    worst = 0.0
    for _ in range(trials):
        lam = _random_spectrum(n, rng)
        for u, is_block in ((haar_orthogonal(n, rng), False), (block_orthogonal(lam, rng), True)):
            t = plasticity_map(lam, u)
            x = _unit_rows(rng, 4, n)
            q_in = (x * x) @ lam
            q_out = ((x @ t.T) ** 2) @ lam
            worst = max(worst, np.abs(q_out - q_in).max())
            singulars = np.linalg.svd(t, compute_uv=False)
            norm = singulars.max()
            worst = max(worst, 1.0 - norm)
            if is_block:
                worst = max(worst, abs(norm - 1.0))
            if norm <= 1.0 + NORM_SLACK:
                worst = max(worst, np.abs(singulars - 1.0).max())
    return _report("finite_dim_plasticity", 2 * trials, worst, OPERATOR_TOL, seed)


def check_extremal_invariance(
    space: TruncatedQuadraticSpace, trials: int = 100, seed: int = 0
) -> VerificationReport:
    """Accepted contractions leave the extremal eigenspaces invariant.

    Block-diagonal samples are accepted by construction; general samples are
    filtered by ||T|| <= 1.  For each accepted T and each extremal group
    (min and max eigenvalue), the projector commutes with T and T restricted
    to the group is an isometry.
    """
    if space.dimension < 2:
        raise PreconditionError("need dimension >= 2")
    rng = _rng(seed)
    lam = space.lambdas
    worst = 0.0
    extremal = [space.group(lam.min()), space.group(lam.max())]
    for _ in range(trials):
        candidates = [plasticity_map(lam, block_orthogonal(lam, rng))]
        general = plasticity_map(lam, haar_orthogonal(lam.size, rng))
        if operator_norm(general) <= 1.0 + NORM_SLACK:
            candidates.append(general)
        for t in candidates:
            for idx in extremal:
                projector = np.zeros((lam.size, lam.size))
                projector[idx, idx] = 1.0
                worst = max(worst, operator_norm(t @ projector - projector @ t))
                restricted = t[np.ix_(idx, idx)]
                singulars = np.linalg.svd(restricted, compute_uv=False)
                worst = max(worst, np.abs(singulars - 1.0).max())
    return _report("extremal_invariance", trials, worst, OPERATOR_TOL, seed)
