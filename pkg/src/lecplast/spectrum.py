"""Finite descriptors for spectra of bounded positive self-adjoint operators.

A descriptor lists point spectrum data (atoms with multiplicities, geometric
eigenvalue sequences) and continuous parts (polynomial densities or rescaled
Cantor measures).  All values must stay inside a positive interval, which
keeps the induced quadratic form bounded above and below away from zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.polynomial import Polynomial

from .errors import DomainError, EmptyDescriptorError, RangeError, SchemaError

#: Multiplicity token for an infinite-dimensional eigenspace.
INFINITE = math.inf

# Grid used to certify that a density payload is nonnegative on its support.
_DENSITY_GRID = 1024


class Direction(str, Enum):
    INCREASING = "inc"
    DECREASING = "dec"


class PartKind(str, Enum):
    DENSITY = "density"
    CANTOR = "cantor"


@dataclass(frozen=True, order=True)
class EigenAtom:
    """Eigenvalue with multiplicity; ``INFINITE`` marks an infinite eigenspace."""

    value: float
    multiplicity: float = 1

    def __post_init__(self):
        if not self.value > 0:
            raise DomainError(f"atom value must be positive, got {self.value}")
        if self.multiplicity != INFINITE:
            if (
                not math.isfinite(self.multiplicity)
                or self.multiplicity != int(self.multiplicity)
                or self.multiplicity < 1
            ):
                raise DomainError(
                    f"multiplicity must be a positive integer or INFINITE, "
                    f"got {self.multiplicity}"
                )

    @property
    def is_infinite(self) -> bool:
        return self.multiplicity == INFINITE


@dataclass(frozen=True, order=True)
class EigenSequence:
    """Strictly monotone eigenvalue sequence term(j) approaching ``limit``.

    term(j) = limit - offset*ratio**j for INCREASING,
              limit + offset*ratio**j for DECREASING,  j = 1, 2, ...
    The limit itself is never a term.
    """

    limit: float
    direction: Direction
    offset: float
    ratio: float
    multiplicity: int = 1

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction(self.direction))
        if not self.limit > 0:
            raise DomainError(f"sequence limit must be positive, got {self.limit}")
        if not self.offset > 0:
            raise DomainError(f"sequence offset must be positive, got {self.offset}")
        if not 0 < self.ratio < 1:
            raise DomainError(f"sequence ratio must lie in (0, 1), got {self.ratio}")
        if (
            not math.isfinite(self.multiplicity)
            or self.multiplicity != int(self.multiplicity)
            or self.multiplicity < 1
        ):
            raise DomainError(
                f"per-term multiplicity must be a positive integer, "
                f"got {self.multiplicity}"
            )
        if self.direction is Direction.INCREASING and not self.term(1) > 0:
            raise DomainError(
                "increasing sequence has a nonpositive first term "
                f"(limit {self.limit}, offset {self.offset}, ratio {self.ratio})"
            )

    def term(self, j: int) -> float:
        if j < 1:
            raise RangeError(f"sequence terms are indexed from 1, got {j}")
        step = self.offset * self.ratio**j
        if self.direction is Direction.INCREASING:
            return self.limit - step
        return self.limit + step

    def terms(self, count: int, first: int = 1) -> np.ndarray:
        j = np.arange(first, first + count)
        step = self.offset * self.ratio**j
        if self.direction is Direction.INCREASING:
            return self.limit - step
        return self.limit + step


@dataclass(frozen=True)
class ContinuousPart:
    """Atomless measure component on [a, b].

    DENSITY carries ascending polynomial coefficients (the density, required
    nonnegative on the support with positive total mass).  CANTOR carries the
    total mass of the standard Cantor measure mapped affinely onto [a, b].
    The type allows a >= 0 so it can double as plain measure data; descriptors
    additionally require a > 0 (see SpectralDescriptor).
    """

    kind: PartKind
    support: tuple[float, float]
    coeffs: tuple[float, ...] | None = None
    mass: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", PartKind(self.kind))
        object.__setattr__(self, "support", (float(self.support[0]), float(self.support[1])))
        a, b = self.support
        if not (a >= 0 and b > a):
            raise DomainError(f"support must satisfy 0 <= a < b, got [{a}, {b}]")
        if self.kind is PartKind.DENSITY:
            if self.mass is not None:
                raise DomainError("density parts must not declare a mass")
            if not self.coeffs:
                raise DomainError("density parts need a polynomial coefficient list")
            object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
            grid = np.linspace(a, b, _DENSITY_GRID)
            values = Polynomial(self.coeffs)(grid)
            if values.min() < 0:
                raise DomainError("density is negative on its support")
            if not self.total_mass > 0:
                raise DomainError("density integrates to zero mass")
        else:
            if self.coeffs is not None:
                raise DomainError("cantor parts must not carry coefficients")
            if self.mass is None or not self.mass > 0:
                raise DomainError(f"cantor parts need a positive mass, got {self.mass}")
            object.__setattr__(self, "mass", float(self.mass))

    @property
    def total_mass(self) -> float:
        if self.kind is PartKind.CANTOR:
            return self.mass
        a, b = self.support
        antiderivative = Polynomial(self.coeffs).integ()
        return float(antiderivative(b) - antiderivative(a))


@dataclass(frozen=True)
class SpectralDescriptor:
    """Complete finite description of a spectrum inside (0, inf)."""

    atoms: tuple[EigenAtom, ...] = ()
    sequences: tuple[EigenSequence, ...] = ()
    continuous: tuple[ContinuousPart, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "sequences", tuple(self.sequences))
        object.__setattr__(self, "continuous", tuple(self.continuous))
        for part in self.continuous:
            if not part.support[0] > 0:
                raise DomainError(
                    f"spectral continuous parts need support bounded away from 0, "
                    f"got [{part.support[0]}, {part.support[1]}]"
                )

    @property
    def is_empty(self) -> bool:
        return not (self.atoms or self.sequences or self.continuous)

    @property
    def has_point_spectrum(self) -> bool:
        return bool(self.atoms or self.sequences)


def canonicalize(d: SpectralDescriptor) -> SpectralDescriptor:
    """Merge duplicate atoms, then sort every component list.

    Atom multiplicities at equal values add; INFINITE absorbs.  Collisions of
    an atom with a sequence term are left in place: enumerate_points merges
    them by value (the overlay), terms are never deleted.  Idempotent.
    """
    merged: dict[float, float] = {}
    for atom in d.atoms:
        prior = merged.get(atom.value, 0)
        merged[atom.value] = (
            INFINITE
            if INFINITE in (prior, atom.multiplicity)
            else prior + atom.multiplicity
        )
    atoms = tuple(EigenAtom(v, m) for v, m in sorted(merged.items()))
    return SpectralDescriptor(
        atoms=atoms,
        sequences=tuple(sorted(d.sequences)),
        continuous=tuple(sorted(d.continuous, key=_part_key)),
    )


def _part_key(part: ContinuousPart):
    return (part.support, part.kind.value, part.coeffs or (), part.mass or 0.0)


def spectral_bounds(d: SpectralDescriptor) -> tuple[float, float]:
    """Envelope [lo, hi] of the spectrum, including unattained sequence limits."""
    if d.is_empty:
        raise EmptyDescriptorError("cannot bound an empty descriptor")
    values: list[float] = []
    for atom in d.atoms:
        values.append(atom.value)
    for seq in d.sequences:
        values.extend((seq.limit, seq.term(1)))
    for part in d.continuous:
        values.extend(part.support)
    return min(values), max(values)


def enumerate_points(
    d: SpectralDescriptor,
    per_sequence: int,
    replication: int | None = None,
) -> list[tuple[float, int]]:
    """Finite truncation of the point spectrum, sorted ascending.

    Each sequence contributes its first ``per_sequence`` terms; INFINITE atom
    multiplicities are rendered as ``replication`` copies (default
    2*per_sequence, enough for the bilateral shift window).  Points sharing a
    value merge by adding multiplicities (the atom/term overlay).
    """
    if per_sequence < 1:
        raise DomainError(f"per_sequence must be positive, got {per_sequence}")
    if replication is None:
        replication = 2 * per_sequence
    counts: dict[float, int] = {}
    for atom in d.atoms:
        mult = replication if atom.is_infinite else int(atom.multiplicity)
        counts[atom.value] = counts.get(atom.value, 0) + mult
    for seq in d.sequences:
        for value in seq.terms(per_sequence):
            value = float(value)
            counts[value] = counts.get(value, 0) + seq.multiplicity
    return sorted(counts.items())


# ---------------------------------------------------------------------------
# JSON schema (owned by the cli module; field names are part of the contract)
# ---------------------------------------------------------------------------

_ATOM_KEYS = {"value", "multiplicity"}
_SEQ_KEYS = {"limit", "direction", "offset", "ratio", "multiplicity"}
_DENSITY_KEYS = {"kind", "support", "coeffs"}
_CANTOR_KEYS = {"kind", "support", "mass"}


def _require_number(obj, where: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise SchemaError(f"{where}: expected a number, got {obj!r}")
    return float(obj)


def _require_int(obj, where: str) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise SchemaError(f"{where}: expected an integer, got {obj!r}")
    return obj


def _require_keys(obj, allowed: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object, got {type(obj).__name__}")
    if set(obj) != allowed:
        raise SchemaError(
            f"{where}: expected fields {sorted(allowed)}, got {sorted(obj)}"
        )


def parse_descriptor(document: dict) -> SpectralDescriptor:
    """Validate a descriptor document and return its canonical form."""
    if not isinstance(document, dict):
        raise SchemaError("descriptor document must be a JSON object")
    unknown = set(document) - {"atoms", "sequences", "continuous"}
    if unknown:
        raise SchemaError(f"unknown top-level fields: {sorted(unknown)}")

    atoms = []
    for i, entry in enumerate(document.get("atoms", [])):
        where = f"atoms[{i}]"
        _require_keys(entry, _ATOM_KEYS, where)
        mult = entry["multiplicity"]
        if mult == "inf":
            mult = INFINITE
        else:
            mult = _require_int(mult, f"{where}.multiplicity")
        atoms.append(EigenAtom(_require_number(entry["value"], f"{where}.value"), mult))

    sequences = []
    for i, entry in enumerate(document.get("sequences", [])):
        where = f"sequences[{i}]"
        _require_keys(entry, _SEQ_KEYS, where)
        if entry["direction"] not in ("inc", "dec"):
            raise SchemaError(f"{where}.direction: expected 'inc' or 'dec'")
        sequences.append(
            EigenSequence(
                limit=_require_number(entry["limit"], f"{where}.limit"),
                direction=Direction(entry["direction"]),
                offset=_require_number(entry["offset"], f"{where}.offset"),
                ratio=_require_number(entry["ratio"], f"{where}.ratio"),
                multiplicity=_require_int(entry["multiplicity"], f"{where}.multiplicity"),
            )
        )

    continuous = []
    for i, entry in enumerate(document.get("continuous", [])):
        where = f"continuous[{i}]"
        if not isinstance(entry, dict) or entry.get("kind") not in ("density", "cantor"):
            raise SchemaError(f"{where}.kind: expected 'density' or 'cantor'")
        keys = _DENSITY_KEYS if entry["kind"] == "density" else _CANTOR_KEYS
        _require_keys(entry, keys, where)
        support = entry["support"]
        if not isinstance(support, (list, tuple)) or len(support) != 2:
            raise SchemaError(f"{where}.support: expected [a, b]")
        a = _require_number(support[0], f"{where}.support[0]")
        b = _require_number(support[1], f"{where}.support[1]")
        if entry["kind"] == "density":
            coeffs = entry["coeffs"]
            if not isinstance(coeffs, list) or not coeffs:
                raise SchemaError(f"{where}.coeffs: expected a nonempty list")
            coeffs = tuple(
                _require_number(c, f"{where}.coeffs[{j}]") for j, c in enumerate(coeffs)
            )
            continuous.append(ContinuousPart(PartKind.DENSITY, (a, b), coeffs=coeffs))
        else:
            continuous.append(
                ContinuousPart(
                    PartKind.CANTOR,
                    (a, b),
                    mass=_require_number(entry["mass"], f"{where}.mass"),
                )
            )

    descriptor = SpectralDescriptor(tuple(atoms), tuple(sequences), tuple(continuous))
    if descriptor.is_empty:
        raise DomainError("descriptor is empty")
    return canonicalize(descriptor)


def serialize_descriptor(d: SpectralDescriptor) -> dict:
    """Inverse of parse_descriptor on canonical descriptors."""
    doc: dict = {}
    if d.atoms:
        doc["atoms"] = [
            {
                "value": atom.value,
                "multiplicity": "inf" if atom.is_infinite else int(atom.multiplicity),
            }
            for atom in d.atoms
        ]
    if d.sequences:
        doc["sequences"] = [
            {
                "limit": seq.limit,
                "direction": seq.direction.value,
                "offset": seq.offset,
                "ratio": seq.ratio,
                "multiplicity": seq.multiplicity,
            }
            for seq in d.sequences
        ]
    if d.continuous:
        doc["continuous"] = [
            {"kind": part.kind.value, "support": list(part.support)}
            | (
                {"coeffs": list(part.coeffs)}
                if part.kind is PartKind.DENSITY
                else {"mass": part.mass}
            )
            for part in d.continuous
        ]
    return doc
