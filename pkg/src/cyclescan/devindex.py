"""Hurst-space constructions: reference vector, similarity, Development Index.

Each market is a point h in the 9-dimensional space of per-cycle Hurst
exponents. Markets are compared through unit vectors s = (h - m)/|h - m|
relative to a reference vector m, their cosine similarities, and their
projections Pi = s . e onto a fixed direction of development e. Large
positive Pi marks developed-market scaling structure.

The canonical direction (the published 9 constants, default) is not
unit-norm (|e| ~ 1.44) and does not follow from applying the defining
formula to the bundled reference row; both variants are provided and
the choice is explicit in every report.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import DegenerateVector, IncompleteVector

__all__ = [
    "N_COMPONENTS",
    "CANONICAL_DIRECTION",
    "REFERENCE_FIXTURE_M",
    "GROUP_LABELS",
    "ReferenceVector",
    "UnitVector",
    "DevelopmentDirection",
    "ClassificationResult",
    "DevelopmentReport",
    "HurstFixture",
    "load_fixture",
    "reference_vector",
    "unit_vector",
    "similarity_matrix",
    "development_direction",
    "development_index",
    "classify",
    "development_report",
    "fixture_report",
]

N_COMPONENTS = 9

#: Published direction of development in Hurst space (9 constants).
CANONICAL_DIRECTION = np.array(
    [-0.19, -0.40, -0.37, -0.45, -0.45, -0.57, -0.60, -0.59, -0.56]
)

#: Reference row bundled with the 18-market fixture (2-decimal values).
#: The componentwise mean of the bundled matrix deviates from this row
#: by up to 0.017 in four components; reports built from the fixture
#: use this row so that published projections are reproduced.
REFERENCE_FIXTURE_M = np.array(
    [0.37, 0.51, 0.49, 0.54, 0.54, 0.62, 0.64, 0.63, 0.61]
)

GROUP_LABELS = ("underdeveloped", "emerging", "developed")

#: Values within this distance of a border are borderline -> emerging.
BORDERLINE_BAND = 0.01

_FIXTURE_FILE = "hurst_vectors_18smi.csv"


@dataclass(frozen=True)
class ReferenceVector:
    """Componentwise mean of market Hurst vectors, with a stability check.

    ``loo_max_delta`` is the largest componentwise change observed when
    any single market is removed (reported, not enforced).
    """

    m: np.ndarray
    n_markets: int
    loo_max_delta: float


@dataclass(frozen=True)
class UnitVector:
    """Normalized offset of one market from the reference vector."""

    market_id: str
    s: np.ndarray

    def __post_init__(self):
        norm = float(np.linalg.norm(self.s))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"{self.market_id}: unit vector norm {norm} != 1")


@dataclass(frozen=True)
class DevelopmentDirection:
    """Direction in Hurst space onto which unit vectors are projected."""

    e: np.ndarray
    source: str  # "canonical" or "formula"


@dataclass(frozen=True)
class ClassificationResult:
    pi_max: float
    border_upper: float  # Pi_c1 = +|Pi|_max / 2
    border_lower: float  # Pi_c2 = -|Pi|_max / 2
    classes: dict
    borderline: dict


@dataclass(frozen=True)
class DevelopmentReport:
    market_ids: tuple[str, ...]
    similarity: np.ndarray
    indices: dict
    classification: ClassificationResult
    direction: DevelopmentDirection
    reference: np.ndarray

    def to_json(self) -> str:
        payload = {
            "markets": list(self.market_ids),
            "reference_vector": [float(v) for v in self.reference],
            "direction": {
                "source": self.direction.source,
                "e": [float(v) for v in self.direction.e],
            },
            "similarity": [[float(v) for v in row] for row in self.similarity],
            "development_index": {k: float(v) for k, v in self.indices.items()},
            "pi_max": self.classification.pi_max,
            "borders": {
                "developed_vs_emerging": self.classification.border_upper,
                "emerging_vs_underdeveloped": self.classification.border_lower,
            },
            "classes": dict(self.classification.classes),
            "borderline": {k: bool(v) for k, v in self.classification.borderline.items()},
        }
        return json.dumps(payload, indent=2)


@dataclass(frozen=True)
class HurstFixture:
    """Bundled 18-market Hurst matrix with group labels and reference row."""

    market_ids: tuple[str, ...]
    groups: dict
    h: np.ndarray  # shape (n_markets, 9)
    m_reference: np.ndarray


def load_fixture() -> HurstFixture:
    """Load the bundled 18-market fixture (2-decimal printed values)."""
    path = resources.files("cyclescan.data").joinpath(_FIXTURE_FILE)
    with path.open("r", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        ids, groups, rows = [], {}, []
        for row in reader:
            ids.append(row["market_id"])
            groups[row["market_id"]] = row["group"]
            rows.append([float(row[f"h{k}"]) for k in range(1, N_COMPONENTS + 1)])
    return HurstFixture(
        market_ids=tuple(ids),
        groups=groups,
        h=np.array(rows),
        m_reference=REFERENCE_FIXTURE_M.copy(),
    )


def _as_matrix(hs, market_ids=None) -> tuple[np.ndarray, list[str]]:
    """Accept HurstVector objects or raw rows; reject incomplete vectors."""
    rows, ids = [], []
    for k, item in enumerate(hs):
        vec = getattr(item, "h", item)
        name = getattr(item, "market_id", None) or (
            market_ids[k] if market_ids is not None else f"market-{k}"
        )
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (N_COMPONENTS,) or not np.all(np.isfinite(vec)):
            raise IncompleteVector(f"{name}: expected {N_COMPONENTS} finite components")
        rows.append(vec)
        ids.append(name)
    return np.array(rows), ids


def reference_vector(hs) -> ReferenceVector:
    """Componentwise mean over all markets (needs n >= 2, complete vectors)."""
    h, _ = _as_matrix(hs)
    n = len(h)
    if n < 2:
        raise IncompleteVector(f"need at least 2 markets, got {n}")
    m = h.mean(axis=0)
    deltas = [np.max(np.abs(np.delete(h, k, axis=0).mean(axis=0) - m)) for k in range(n)]
    return ReferenceVector(m=m, n_markets=n, loo_max_delta=float(max(deltas)))


def unit_vector(h, m, market_id: str | None = None) -> UnitVector:
    """s = (h - m) / |h - m|; degenerate when h coincides with m."""
    hv = np.asarray(getattr(h, "h", h), dtype=float)
    mv = np.asarray(getattr(m, "m", m), dtype=float)
    name = market_id or getattr(h, "market_id", "")
    diff = hv - mv
    norm = float(np.linalg.norm(diff))
    if norm < 1e-12:
        raise DegenerateVector(f"{name}: Hurst vector equals the reference vector")
    return UnitVector(market_id=name, s=diff / norm)


def similarity_matrix(units) -> np.ndarray:
    """Cosine similarities H[a, b] = s^a . s^b; symmetric, unit diagonal."""
    s = np.array([u.s for u in units])
    sim = s @ s.T
    return np.clip(sim, -1.0, 1.0)


def development_direction(m=None, mode: str = "canonical") -> DevelopmentDirection:
    """Direction of development in Hurst space.

    ``canonical`` returns the published constants. ``formula`` applies
    the definition e = (dh - m)/|dh - m| with dh = -1 in every
    component, which is unit-norm but does not reproduce the canonical
    constants (see module docstring).
    """
    if mode == "canonical":
        return DevelopmentDirection(e=CANONICAL_DIRECTION.copy(), source="canonical")
    if mode == "formula":
        if m is None:
            raise ValueError("formula mode requires the reference vector")
        mv = np.asarray(getattr(m, "m", m), dtype=float)
        diff = -1.0 - mv
        return DevelopmentDirection(e=diff / np.linalg.norm(diff), source="formula")
    raise ValueError(f"mode must be 'canonical' or 'formula', got {mode!r}")


def development_index(s, e) -> float:
    """Projection Pi = sum_i s_i e_i of a unit vector onto the direction."""
    sv = np.asarray(getattr(s, "s", s), dtype=float)
    ev = np.asarray(getattr(e, "e", e), dtype=float)
    if sv.shape != ev.shape:
        raise ValueError("dimension mismatch between unit vector and direction")
    return float(np.dot(sv, ev))


def classify(indices: dict, borderline_band: float = BORDERLINE_BAND) -> ClassificationResult:
    """Three-way split at the symmetric borders +-|Pi|_max / 2.

    Markets above the upper border are developed, below the lower
    border underdeveloped, emerging between. Values within
    ``borderline_band`` of a border are flagged and resolved to
    emerging.
    """
    if not indices:
        raise ValueError("need at least one development index")
    values = np.array(list(indices.values()), dtype=float)
    pi_max = float(np.max(np.abs(values)))
    upper, lower = pi_max / 2.0, -pi_max / 2.0
    classes, borderline = {}, {}
    for market, pi in indices.items():
        near = abs(pi - upper) <= borderline_band or abs(pi - lower) <= borderline_band
        borderline[market] = near
        if near:
            classes[market] = "emerging"
        elif pi > upper:
            classes[market] = "developed"
        elif pi < lower:
            classes[market] = "underdeveloped"
        else:
            classes[market] = "emerging"
    return ClassificationResult(pi_max=pi_max, border_upper=upper,
                                border_lower=lower, classes=classes,
                                borderline=borderline)


def development_report(hs, m=None, mode: str = "canonical",
                       borderline_band: float = BORDERLINE_BAND,
                       market_ids=None) -> DevelopmentReport:
    """Full Hurst-space analysis of a set of complete Hurst vectors.

    When ``m`` is omitted it is computed from the inputs; passing an
    explicit reference (e.g. a published row) overrides it.
    """
    h, ids = _as_matrix(hs, market_ids)
    if m is None:
        m_vec = reference_vector(h).m
    else:
        m_vec = np.asarray(getattr(m, "m", m), dtype=float)
    units = [unit_vector(h[k], m_vec, market_id=ids[k]) for k in range(len(h))]
    direction = development_direction(m_vec, mode=mode)
    indices = {u.market_id: development_index(u, direction) for u in units}
    return DevelopmentReport(
        market_ids=tuple(ids),
        similarity=similarity_matrix(units),
        indices=indices,
        classification=classify(indices, borderline_band),
        direction=direction,
        reference=m_vec,
    )


def fixture_report(mode: str = "canonical") -> DevelopmentReport:
    """Development report over the bundled 18-market fixture.

    Uses the fixture's bundled reference row (not the recomputed mean)
    so published projections and the three-way grouping are reproduced.
    """
    fixture = load_fixture()
    return development_report(fixture.h, m=fixture.m_reference, mode=mode,
                              market_ids=fixture.market_ids)
