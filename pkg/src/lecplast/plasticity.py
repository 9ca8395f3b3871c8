"""LEC-plasticity verdicts for spectral descriptors.

The ellipsoid of a descriptor fails to be linearly expand-contract plastic
exactly when the spectrum has a continuous part, or the point spectrum
contains a set B of two or more eigenvalues whose minimum is absent or of
infinite multiplicity and whose maximum is absent or of infinite
multiplicity.  Over the closed descriptor class this reduces to five
decidable rules, checked in a fixed order so that verdicts are
deterministic.  Completeness of the reduction rests on the components being
finite in number: a subset of the point spectrum without a minimum must meet
a single decreasing sequence infinitely often, and symmetrically for maxima.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import PreconditionError
from .spectrum import Direction, SpectralDescriptor


class Rule(str, Enum):
    CONTINUOUS = "CONTINUOUS"
    TWO_INFINITE_ATOMS = "TWO_INFINITE_ATOMS"
    INFINITE_MIN_NO_MAX = "INFINITE_MIN_NO_MAX"
    NO_MIN_INFINITE_MAX = "NO_MIN_INFINITE_MAX"
    NO_MIN_NO_MAX = "NO_MIN_NO_MAX"


#: Reference to a descriptor component: ("atom" | "sequence" | "continuous", index).
ComponentRef = tuple[str, int]


@dataclass(frozen=True)
class ViolationCertificate:
    """Machine-checkable witness data for a non-plastic verdict.

    r = inf B and R = sup B of the violating eigenvalue set B (for the
    CONTINUOUS rule, the support endpoints of the offending part);
    components name the descriptor pieces whose values/terms assemble B.
    """

    rule: Rule
    r: float
    R: float
    components: tuple[ComponentRef, ...]

    def __post_init__(self):
        if not self.r < self.R:
            raise PreconditionError(
                f"certificate needs r < R, got r={self.r}, R={self.R}"
            )

    def to_dict(self) -> dict:
        return {
            "rule": self.rule.value,
            "r": self.r,
            "R": self.R,
            "components": [{"kind": k, "index": i} for k, i in self.components],
        }


@dataclass(frozen=True)
class Verdict:
    plastic: bool
    tau: float | None = None
    certificate: ViolationCertificate | None = None

    def to_dict(self) -> dict:
        doc: dict = {"plastic": self.plastic}
        if self.tau is not None:
            doc["tau"] = self.tau
        if self.certificate is not None:
            doc["certificate"] = self.certificate.to_dict()
        return doc


def violating_subset(d: SpectralDescriptor) -> ViolationCertificate | None:
    """First violation found in rule order, or None when the ellipsoid is plastic.

    Rule order (continuous, then atom-based, then sequence-only) fixes the
    tie-breaking when several violations coexist.  Within a rule the
    components are chosen extremally (widest [r, R]) for determinism.
    """
    if d.continuous:
        part = d.continuous[0]
        return ViolationCertificate(
            Rule.CONTINUOUS, part.support[0], part.support[1], (("continuous", 0),)
        )

    infinite = [(i, a) for i, a in enumerate(d.atoms) if a.is_infinite]
    increasing = [
        (j, s) for j, s in enumerate(d.sequences) if s.direction is Direction.INCREASING
    ]
    decreasing = [
        (j, s) for j, s in enumerate(d.sequences) if s.direction is Direction.DECREASING
    ]

    if len(infinite) >= 2:
        (i_lo, lo), (i_hi, hi) = infinite[0], infinite[-1]
        return ViolationCertificate(
            Rule.TWO_INFINITE_ATOMS,
            lo.value,
            hi.value,
            (("atom", i_lo), ("atom", i_hi)),
        )

    if infinite:
        i_atom, atom = infinite[0]
        above = [(j, s) for j, s in increasing if s.limit > atom.value]
        if above:
            j, seq = max(above, key=lambda item: item[1].limit)
            return ViolationCertificate(
                Rule.INFINITE_MIN_NO_MAX,
                atom.value,
                seq.limit,
                (("atom", i_atom), ("sequence", j)),
            )
        below = [(j, s) for j, s in decreasing if s.limit < atom.value]
        if below:
            j, seq = min(below, key=lambda item: item[1].limit)
            return ViolationCertificate(
                Rule.NO_MIN_INFINITE_MAX,
                seq.limit,
                atom.value,
                (("sequence", j), ("atom", i_atom)),
            )

    if decreasing and increasing:
        j_dec, seq_dec = min(decreasing, key=lambda item: item[1].limit)
        j_inc, seq_inc = max(increasing, key=lambda item: item[1].limit)
        if seq_dec.limit < seq_inc.limit:
            return ViolationCertificate(
                Rule.NO_MIN_NO_MAX,
                seq_dec.limit,
                seq_inc.limit,
                (("sequence", j_dec), ("sequence", j_inc)),
            )

    return None


def classify(d: SpectralDescriptor) -> Verdict:
    """Plasticity verdict with threshold tau (plastic) or certificate (not)."""
    certificate = violating_subset(d)
    if certificate is not None:
        return Verdict(plastic=False, certificate=certificate)
    tau = find_tau(d) if d.has_point_spectrum else None
    return Verdict(plastic=True, tau=tau)


def find_tau(d: SpectralDescriptor) -> float:
    """Split point tau: the point spectrum above tau is well-ordered under >=,
    below tau under <=, and neither side holds an infinite-multiplicity atom.

    Selection: the infinite atom's value if one exists, else the largest
    increasing limit, else the smallest decreasing limit, else the smallest
    atom value.
    """
    if violating_subset(d) is not None:
        raise PreconditionError("find_tau requires a plastic descriptor")
    if not d.has_point_spectrum:
        raise PreconditionError("find_tau requires a nonempty point spectrum")
    for atom in d.atoms:
        if atom.is_infinite:
            return atom.value
    inc = [s.limit for s in d.sequences if s.direction is Direction.INCREASING]
    if inc:
        return max(inc)
    dec = [s.limit for s in d.sequences if s.direction is Direction.DECREASING]
    if dec:
        return min(dec)
    return min(atom.value for atom in d.atoms)
