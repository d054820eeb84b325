"""Folding maps across ridges and their compositions along facet sequences."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .complex import FacetComplex
from .errors import InvalidSequence, NotAdjacent
from .geometry import HPolytope

_DRIFT = 1e-12


def _polar(Q: np.ndarray) -> np.ndarray:
    U, _, Vt = np.linalg.svd(Q)
    return U @ Vt


@dataclass(frozen=True, eq=False)
class AffineIsometry:
    """``x -> linear @ x + translation`` with orthogonal ``linear``."""

    linear: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        Q = np.asarray(self.linear, dtype=float)
        if np.max(np.abs(Q.T @ Q - np.eye(len(Q)))) > _DRIFT:
            Q = _polar(Q)
        object.__setattr__(self, "linear", Q)
        object.__setattr__(self, "translation", np.asarray(self.translation, dtype=float))

    @classmethod
    def identity(cls, d: int) -> "AffineIsometry":
        return cls(np.eye(d), np.zeros(d))

    @property
    def dim(self) -> int:
        return len(self.translation)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return x @ self.linear.T + self.translation

    def apply_vector(self, v) -> np.ndarray:
        return np.asarray(v, dtype=float) @ self.linear.T

    def compose(self, inner: "AffineIsometry") -> "AffineIsometry":
        """``self o inner``."""
        return AffineIsometry(self.linear @ inner.linear, self.linear @ inner.translation + self.translation)

    __matmul__ = compose

    def inverse(self) -> "AffineIsometry":
        QT = self.linear.T
        return AffineIsometry(QT, -QT @ self.translation)

    def apply_polytope(self, P: HPolytope) -> HPolytope:
        return P.transformed(self.linear, self.translation)

    def distance(self, other: "AffineIsometry") -> float:
        return float(max(np.max(np.abs(self.linear - other.linear)), np.max(np.abs(self.translation - other.translation))))


def _fold_table(cx: FacetComplex) -> dict[tuple[int, int], AffineIsometry]:
    table = getattr(cx, "_fold_table", None)
    if table is None:
        table = {}
        for r in cx.ridges:
            a, b = r.facets
            table[(a, b)] = _ridge_fold(cx, r.index, a, b)
            table[(b, a)] = table[(a, b)].inverse()
        cx._fold_table = table
    return table


def _ridge_fold(cx: FacetComplex, r: int, F: int, G: int) -> AffineIsometry:
    """Rigid motion of chart F onto chart G fixing ridge r, F landing opposite G."""
    R = cx.ridges[r]
    PF, PG = R.local[F], R.local[G]
    nF, nG = R.frames[F].normal, R.frames[G].normal
    X = np.vstack([PF[1:] - PF[0], nF])
    Y = np.vstack([PG[1:] - PG[0], -nG])
    U, _, Vt = np.linalg.svd(Y.T @ X)
    Q = U @ Vt
    return AffineIsometry(Q, PG[0] - Q @ PF[0])


def folding_map(cx: FacetComplex, F, G) -> AffineIsometry:
    """Map from chart ``F`` to chart ``G`` across their shared ridge."""
    F, G = cx.facet_index(F), cx.facet_index(G)
    try:
        return _fold_table(cx)[(F, G)]
    except KeyError:
        raise NotAdjacent(f"facets {cx.facets[F].name} and {cx.facets[G].name} share no ridge") from None


def validate_sequence(cx: FacetComplex, seq: Sequence) -> tuple[int, ...]:
    try:
        out = tuple(cx.facet_index(f) for f in seq)
    except KeyError as exc:
        raise InvalidSequence(str(exc)) from None
    if not out:
        raise InvalidSequence("empty facet sequence")
    if len(set(out)) != len(out):
        raise InvalidSequence("facet repeated in sequence")
    for a, b in zip(out, out[1:]):
        if cx.ridge_between(a, b) is None:
            raise InvalidSequence(f"facets {cx.facets[a].name} and {cx.facets[b].name} are not adjacent")
    return out


def unfold_along(cx: FacetComplex, seq: Sequence) -> AffineIsometry:
    """Isometry from the chart of the last facet of ``seq`` into the chart of the first."""
    seq = validate_sequence(cx, seq)
    return _unfold(cx, seq)


def _unfold(cx: FacetComplex, seq: tuple[int, ...]) -> AffineIsometry:
    table = _fold_table(cx)
    M = AffineIsometry.identity(cx.dim)
    for a, b in zip(seq, seq[1:]):
        # chart b -> chart a, applied innermost last
        M = M.compose(table[(b, a)])
    return M


def fold_along(cx: FacetComplex, seq: Sequence) -> AffineIsometry:
    """Isometry from the chart of the first facet of ``seq`` into the chart of the last."""
    return unfold_along(cx, seq).inverse()


def sequential_unfold_set(cx: FacetComplex, pieces: Sequence[tuple[object, HPolytope]], seq: Sequence) -> list[HPolytope]:
    """Unfold polytopes lying in facets of ``seq`` into the chart of its first facet."""
    seq = validate_sequence(cx, seq)
    pos = {f: i for i, f in enumerate(seq)}
    out = []
    for f, P in pieces:
        f = cx.facet_index(f)
        if f not in pos:
            raise InvalidSequence(f"facet {cx.facets[f].name} not in sequence")
        out.append(_unfold(cx, seq[: pos[f] + 1]).apply_polytope(P))
    return out
