"""Axiom checks for graded string-net data over a finite degree slice.

The equations quantify over all generic degrees, so a finite run can only
certify a slice: the caller supplies sample degrees, the validator closes
them under negation and walks every tuple whose derived degrees (pairwise
sums as each equation requires) stay generic.  All checks are evaluated
blockwise, one degree tuple at a time, so a run over k samples touches
every label and branching index exhaustively at those degrees.
"""

import itertools
import math
import string
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .data import LWData
from .errors import DomainError, MissingDataError
from .group import GroupElement

__all__ = ["CheckResult", "ValidationReport", "validate"]


@dataclass
class CheckResult:
    """Outcome of a single axiom check."""

    name: str
    passed: bool
    residual: float
    checked: int
    witness: Optional[dict] = None
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "residual": float(self.residual),
            "checked": self.checked,
            "witness": self.witness,
            "notes": list(self.notes),
        }


@dataclass
class ValidationReport:
    checks: List[CheckResult]
    degrees: List[GroupElement]
    tol: float
    max_tuples: int

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_residual(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "max_residual": float(self.max_residual),
            "tol": self.tol,
            "max_tuples": self.max_tuples,
            "degrees": [str(g) for g in self.degrees],
            "checks": [c.to_dict() for c in self.checks],
        }


def _subscripts(operands: Sequence[Sequence[str]], out: Sequence[str]) -> str:
    """einsum spec from named axes; shared names contract or align."""
    letters: Dict[str, str] = {}

    def encode(axes):
        return "".join(
            letters.setdefault(a, string.ascii_lowercase[len(letters)]) for a in axes
        )

    spec = ",".join(encode(op) for op in operands)
    return spec + "->" + encode(out)


class _Slice:
    """Cached block views of the data over a closed degree sample."""

    def __init__(self, data: LWData, degrees: Sequence[GroupElement], cap: int):
        self.data = data
        self.degrees = list(degrees)
        self.cap = cap
        self._delta: dict = {}
        self._gamma: dict = {}
        self._sixj: dict = {}
        self._perm: dict = {}
        self._scalars: dict = {}

    def generic(self, g: GroupElement) -> bool:
        return self.data.singular.is_generic(g)

    def tuples(self, arity: int) -> Iterator[Tuple[GroupElement, ...]]:
        # deterministic stride keeps runs over large closures bounded
        total = len(self.degrees) ** arity
        stride = max(1, math.ceil(total / self.cap))
        for t, combo in enumerate(itertools.product(self.degrees, repeat=arity)):
            if t % stride == 0:
                yield combo

    def delta(self, g1, g2, g3) -> np.ndarray:
        key = (g1, g2, g3)
        if key not in self._delta:
            self._delta[key] = self.data.delta_block(g1, g2, g3)
        return self._delta[key]

    def gamma(self, g1, g2, g3) -> np.ndarray:
        key = (g1, g2, g3)
        if key not in self._gamma:
            self._gamma[key] = self.data.gamma_block(g1, g2, g3)
        return self._gamma[key]

    def sixj(self, degs: Tuple[GroupElement, ...]) -> np.ndarray:
        if degs not in self._sixj:
            self._sixj[degs] = self.data.sixj_block(degs)
        return self._sixj[degs]

    def perm(self, g) -> np.ndarray:
        if g not in self._perm:
            self._perm[g] = self.data.dual_perm(g)
        return self._perm[g]

    def scalars(self, g):
        if g not in self._scalars:
            self._scalars[g] = self.data.scalar_vectors(g)
        return self._scalars[g]

    def support(self, degs: Sequence[GroupElement]) -> np.ndarray:
        """Boolean index-range tensor over labels(g1)..labels(g6), a1..a4."""
        g1, g2, g3, g4, g5, g6 = degs
        m = self.data.mult_bound
        rng = np.arange(1, m + 1)
        b1 = np.take(self.delta(g1, g2, -g3), self.perm(g3), axis=2)
        b2 = np.take(self.delta(g3, g4, -g5), self.perm(g5), axis=2)
        b3 = np.take(
            np.take(self.delta(g5, -g6, -g1), self.perm(g6), axis=1),
            self.perm(g1),
            axis=2,
        )
        b4 = np.take(
            np.take(self.delta(g6, -g4, -g2), self.perm(g4), axis=1),
            self.perm(g2),
            axis=2,
        )
        conds = [
            (rng <= b[..., None]).astype(int)
            for b in (b1, b2, b3, b4)
        ]
        spec = _subscripts(
            [
                ["j1", "j2", "j3", "a1"],
                ["j3", "j4", "j5", "a2"],
                ["j5", "j6", "j1", "a3"],
                ["j6", "j4", "j2", "a4"],
            ],
            ["j1", "j2", "j3", "j4", "j5", "j6", "a1", "a2", "a3", "a4"],
        )
        return np.einsum(spec, *conds) > 0


class _Runner:
    """Accumulates residuals, witnesses, and incompleteness notes."""

    def __init__(self, name: str, tol: float):
        self.name = name
        self.tol = tol
        self.residual = 0.0
        self.witness: Optional[dict] = None
        self.checked = 0
        self.notes: List[str] = []
        self._skipped = 0

    def record(self, residual: float, witness: Callable[[], dict]):
        self.checked += 1
        if residual > self.residual:
            self.residual = float(residual)
            if residual > self.tol:
                self.witness = witness()

    def skip_missing(self, exc: MissingDataError):
        self._skipped += 1
        msg = str(exc)
        if msg not in self.notes and len(self.notes) < 4:
            self.notes.append(msg)

    def result(self) -> CheckResult:
        notes = list(self.notes)
        if self._skipped:
            notes.append(
                f"{self._skipped} tuple(s) skipped for missing table entries"
            )
        passed = self.residual <= self.tol
        return CheckResult(
            self.name,
            passed,
            self.residual,
            self.checked,
            self.witness if not passed else None,
            notes,
        )


def _argmax_entry(diff: np.ndarray) -> list:
    flat = int(np.argmax(np.abs(diff)))
    return [int(i) for i in np.unravel_index(flat, diff.shape)]


# -- the ten checks, in report order -----------------------------------------


def _check_dual_involution(sl: _Slice, tol: float) -> CheckResult:
    run = _Runner("dual_involution", tol)
    for g in sl.degrees:
        try:
            labels = sl.data.labels(g)
            for lbl in labels:
                dual = sl.data.dual(lbl)
                ok = dual.degree == -g and sl.data.dual(dual).id == lbl.id
                run.record(
                    0.0 if ok else 1.0,
                    lambda lbl=lbl, g=g: {"degree": str(g), "label": str(lbl.id)},
                )
        except MissingDataError as exc:
            run.skip_missing(exc)
    return run.result()


def _check_scalar_reality_duality(sl: _Slice, tol: float) -> CheckResult:
    # reality of d, b, beta, gamma is structural (stored as reals);
    # what remains is invariance under the dual involution
    run = _Runner("scalar_reality_duality", tol)
    for g in sl.degrees:
        try:
            here = sl.scalars(g)
            there = sl.scalars(-g)
            perm = sl.perm(g)
            for name, a, b in zip("dbB", here, there):
                diff = np.abs(a - b[perm])
                run.record(
                    float(diff.max()),
                    lambda g=g, name=name, diff=diff: {
                        "degree": str(g),
                        "scalar": {"d": "d", "b": "b", "B": "beta"}[name],
                        "label": str(sl.data.labels(g)[int(np.argmax(diff))].id),
                    },
                )
        except MissingDataError as exc:
            run.skip_missing(exc)
    return run.result()


def _check_delta_symmetry(sl: _Slice, tol: float) -> CheckResult:
    run = _Runner("delta_symmetry", tol)
    for g1, g2, g3 in sl.tuples(3):
        try:
            block = sl.delta(g1, g2, g3)
            if not (g1 + g2 + g3).is_zero:
                diff = np.abs(block).astype(float)
                run.record(
                    float(diff.max()) if diff.size else 0.0,
                    lambda g1=g1, g2=g2, g3=g3, diff=diff: {
                        "degrees": [str(g1), str(g2), str(g3)],
                        "law": "degree constraint",
                        "entry": _argmax_entry(diff),
                    },
                )
                continue
            cyclic = np.transpose(sl.delta(g2, g3, g1), (2, 0, 1))
            sel = np.ix_(sl.perm(g3), sl.perm(g2), sl.perm(g1))
            dual = np.transpose(sl.delta(-g3, -g2, -g1)[sel], (2, 1, 0))
            for law, other in (("cyclic", cyclic), ("dual reversal", dual)):
                diff = np.abs(block - other).astype(float)
                run.record(
                    float(diff.max()),
                    lambda g1=g1, g2=g2, g3=g3, law=law, diff=diff: {
                        "degrees": [str(g1), str(g2), str(g3)],
                        "law": law,
                        "entry": _argmax_entry(diff),
                    },
                )
        except MissingDataError as exc:
            run.skip_missing(exc)
    return run.result()


def _check_b_recursion(sl: _Slice, tol: float) -> CheckResult:
    run = _Runner("b_recursion", tol)
    for g1, g2 in sl.tuples(2):
        g = g1 + g2
        if not sl.generic(g):
            continue
        try:
            b = sl.scalars(g)[1]
            b1 = sl.scalars(g1)[1]
            b2 = sl.scalars(g2)[1]
            # delta(j*, j1, j2) with the first axis re-indexed by j
            dual_delta = np.take(sl.delta(-g, g1, g2), sl.perm(g), axis=0)
            rhs = np.einsum("iab,a,b->i", dual_delta, b1, b2)
            diff = np.abs(b - rhs)
            run.record(
                float(diff.max()),
                lambda g=g, g1=g1, g2=g2, diff=diff: {
                    "degrees": [str(g1), str(g2)],
                    "label": str(sl.data.labels(g)[int(np.argmax(diff))].id),
                },
            )
        except MissingDataError as exc:
            run.skip_missing(exc)
    return run.result()


def _check_gamma_beta_normalization(sl: _Slice, tol: float) -> CheckResult:
    run = _Runner("gamma_beta_normalization", tol)
    m = sl.data.mult_bound
    rng = np.arange(1, m + 1)
    for g1, g2 in sl.tuples(2):
        g3 = -g1 - g2
        if not sl.generic(g3):
            continue
        try:
            bounds = sl.delta(g1, g2, g3)
            forward = sl.gamma(g1, g2, g3)
            sel = np.ix_(sl.perm(g3), sl.perm(g2), sl.perm(g1))
            reverse = np.transpose(sl.gamma(-g3, -g2, -g1)[sel], (2, 1, 0, 3))
            betas = [sl.scalars(g)[2] for g in (g1, g2, g3)]
            beta = np.einsum("a,b,c->abc", *betas)
            product = forward * reverse * beta[..., None]
            mask = rng <= bounds[..., None]
            if not mask.any():
                run.checked += 1
                continue
            diff = np.where(mask, np.abs(product - 1.0), 0.0)
            run.record(
                float(diff.max()),
                lambda g1=g1, g2=g2, g3=g3, diff=diff: {
                    "degrees": [str(g1), str(g2), str(g3)],
                    "entry": _argmax_entry(diff),
                },
            )
        except MissingDataError as exc:
            run.skip_missing(exc)
    return run.result()


def _sextuple_roots(sl: _Slice):
    """Degree sextuples (g1..g6) built from three free roots."""
    for g1, g2, g4 in sl.tuples(3):
        g3 = g1 + g2
        g5 = g3 + g4
        g6 = g5 - g1
        if all(sl.generic(g) for g in (g3, g5, g6)):
            yield (g1, g2, g3, g4, g5, g6)


def _check_sixj_support(sl: _Slice, tol: float) -> CheckResult:
    run = _Runner("sixj_support", tol)
    for degs in _sextuple_roots(sl):
        try:
            block = sl.sixj(degs)
            outside = ~sl.support(degs)
            diff = np.where(outside, np.abs(block), 0.0)
            run.record(
                float(diff.max()),
                lambda degs=degs, diff=diff: {
                    "degrees": [str(g) for g in degs],
                    "entry": _argmax_entry(diff),
                },
            )
        except MissingDataError as exc:
            run.skip_missing(exc)
    return run.result()


def _check_tetrahedral_symmetry(sl: _Slice, tol: float) -> CheckResult:
    run = _Runner("tetrahedral_symmetry", tol)
    for degs in _sextuple_roots(sl):
        g1, g2, g3, g4, g5, g6 = degs
        try:
            block = sl.sixj(degs)
            # first identity: labels (j2, j3*, j1*, j5, j6, j4), slots (a1 a3; a4 a2)
            first = sl.sixj((g2, -g3, -g1, g5, g6, g4))
            first = np.take(first, sl.perm(g3), axis=1)
            first = np.take(first, sl.perm(g1), axis=2)
            first = np.transpose(first, (2, 0, 1, 5, 3, 4, 6, 9, 7, 8))
            # second identity: labels (j3, j4, j5, j6*, j1, j2*), slots (a2 a3; a1 a4)
            second = sl.sixj((g3, g4, g5, -g6, g1, -g2))
            second = np.take(second, sl.perm(g6), axis=3)
            second = np.take(second, sl.perm(g2), axis=5)
            second = np.transpose(second, (4, 5, 0, 1, 2, 3, 8, 6, 7, 9))
            for law, other in (("rotation", first), ("column flip", second)):
                diff = np.abs(block - other)
                run.record(
                    float(diff.max()),
                    lambda degs=degs, law=law, diff=diff: {
                        "degrees": [str(g) for g in degs],
                        "law": law,
                        "entry": _argmax_entry(diff),
                    },
                )
        except MissingDataError as exc:
            run.skip_missing(exc)
    return run.result()


_PENT_T1 = ["x1", "x2", "x5", "x3", "x6", "xj", "a1", "a2", "c1", "c2"]
_PENT_T2 = ["x1", "xj", "x6", "x4", "x0", "x7", "c1", "a3", "a0", "c3"]
_PENT_T3 = ["x2", "x3", "xj", "x4", "x7", "x8", "c2", "c3", "a4", "a5"]
_PENT_T4 = ["x5", "x3", "x6", "x4", "x0", "x8", "a2", "a3", "c4", "a5"]
_PENT_T5 = ["x1", "x2", "x5", "x8", "x0", "x7", "a1", "c4", "a0", "a4"]
_PENT_OUT = ["x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x0"] + [
    "a0", "a1", "a2", "a3", "a4", "a5",
]
_PENT_LHS = _subscripts([_PENT_T1, _PENT_T2, _PENT_T3, ["xj"]], _PENT_OUT)
_PENT_RHS = _subscripts([_PENT_T4, _PENT_T5], _PENT_OUT)


def _check_pentagon(sl: _Slice, tol: float) -> CheckResult:
    run = _Runner("pentagon", tol)
    for g1, g2, g3, g4 in sl.tuples(4):
        gj = g2 + g3
        g5 = g1 + g2
        g6 = g5 + g3
        g0 = g6 + g4
        g7 = gj + g4
        g8 = g3 + g4
        if not all(sl.generic(g) for g in (gj, g5, g6, g0, g7, g8)):
            continue
        try:
            t1 = sl.sixj((g1, g2, g5, g3, g6, gj))
            t2 = sl.sixj((g1, gj, g6, g4, g0, g7))
            t3 = sl.sixj((g2, g3, gj, g4, g7, g8))
            t4 = sl.sixj((g5, g3, g6, g4, g0, g8))
            t5 = sl.sixj((g1, g2, g5, g8, g0, g7))
            d = sl.scalars(gj)[0]
            lhs = np.einsum(_PENT_LHS, t1, t2, t3, d.astype(complex))
            rhs = np.einsum(_PENT_RHS, t4, t5)
            diff = np.abs(lhs - rhs)
            run.record(
                float(diff.max()),
                lambda g1=g1, g2=g2, g3=g3, g4=g4, diff=diff: {
                    "degrees": [str(g) for g in (g1, g2, g3, g4)],
                    "entry": _argmax_entry(diff),
                },
            )
        except MissingDataError as exc:
            run.skip_missing(exc)
    return run.result()


_ORTHO_T1 = ["i", "j", "p", "l", "m", "n", "a1", "a2", "a3", "a4"]
_ORTHO_T2 = ["k", "j", "i", "n", "m", "l", "b1", "a3", "b2", "a4"]
_ORTHO_OUT = ["i", "j", "p", "l", "m", "k", "a1", "a2", "b1", "b2"]
_ORTHO_LHS = _subscripts([_ORTHO_T1, _ORTHO_T2, ["n"]], _ORTHO_OUT)
_ORTHO_RHS = _subscripts(
    [
        ["p", "k"],
        ["a1", "b1"],
        ["a2", "b2"],
        ["k"],
        ["i", "j", "p", "a1"],
        ["p", "l", "m", "a2"],
        ["i", "j", "k", "b1"],
        ["k", "l", "m", "b2"],
    ],
    _ORTHO_OUT,
)


def _check_orthogonality(sl: _Slice, tol: float) -> CheckResult:
    run = _Runner("orthogonality", tol)
    m_bound = sl.data.mult_bound
    rng = np.arange(1, m_bound + 1)
    eye_a = np.eye(m_bound)
    for gi, gj, gl in sl.tuples(3):
        gp = gi + gj
        gm = gp + gl
        gn = gm - gi
        if not all(sl.generic(g) for g in (gp, gm, gn)):
            continue
        try:
            t1 = sl.sixj((gi, gj, gp, gl, gm, gn))
            t2 = sl.sixj((gp, -gj, gi, gn, gm, gl))
            t2 = np.take(t2, sl.perm(gj), axis=1)
            d_n = sl.scalars(gn)[0]
            d_k = sl.scalars(gp)[0]
            lhs = np.einsum(_ORTHO_LHS, t1, t2, d_n.astype(complex))
            eye_pk = np.eye(len(d_k))
            top = np.take(sl.delta(gi, gj, -gp), sl.perm(gp), axis=2)
            bottom = np.take(sl.delta(gp, gl, -gm), sl.perm(gm), axis=2)
            v_top = (rng <= top[..., None]).astype(float)
            v_bottom = (rng <= bottom[..., None]).astype(float)
            rhs = np.einsum(
                _ORTHO_RHS,
                eye_pk, eye_a, eye_a, 1.0 / d_k,
                v_top, v_bottom, v_top, v_bottom,
            )
            diff = np.abs(lhs - rhs)
            run.record(
                float(diff.max()),
                lambda gi=gi, gj=gj, gl=gl, diff=diff: {
                    "degrees": [str(gi), str(gj), str(gl)],
                    "entry": _argmax_entry(diff),
                },
            )
        except MissingDataError as exc:
            run.skip_missing(exc)
    return run.result()


_CONJ_SPEC = _subscripts(
    [
        ["j1", "j2", "j3", "j4", "j5", "j6", "a1", "a2", "a3", "a4"],
        ["j1", "j2", "j3", "a1"],
        ["j3", "j4", "j5", "a2"],
        ["j1", "j5", "j6", "a3"],
        ["j2", "j6", "j4", "a4"],
        ["j1"], ["j2"], ["j3"], ["j4"], ["j5"], ["j6"],
    ],
    ["j1", "j2", "j3", "j4", "j5", "j6", "a1", "a2", "a3", "a4"],
)


def _check_conjugation(sl: _Slice, tol: float) -> CheckResult:
    run = _Runner("conjugation", tol)
    for degs in _sextuple_roots(sl):
        g1, g2, g3, g4, g5, g6 = degs
        try:
            block = sl.sixj(degs)
            # labels (j2*, j1*, j3*, j5, j4, j6), slots (a1 a2; a4 a3)
            partner = sl.sixj((-g2, -g1, -g3, g5, g4, g6))
            partner = np.take(partner, sl.perm(g2), axis=0)
            partner = np.take(partner, sl.perm(g1), axis=1)
            partner = np.take(partner, sl.perm(g3), axis=2)
            partner = np.transpose(partner, (1, 0, 2, 4, 3, 5, 6, 7, 9, 8))
            gam1 = np.take(sl.gamma(g1, g2, -g3), sl.perm(g3), axis=2)
            gam2 = np.take(sl.gamma(g3, g4, -g5), sl.perm(g5), axis=2)
            gam3 = np.take(
                np.take(sl.gamma(-g1, g5, -g6), sl.perm(g1), axis=0),
                sl.perm(g6),
                axis=2,
            )
            gam4 = np.take(
                np.take(sl.gamma(-g2, g6, -g4), sl.perm(g2), axis=0),
                sl.perm(g4),
                axis=2,
            )
            betas = [sl.scalars(g)[2] for g in degs]
            rhs = np.einsum(_CONJ_SPEC, partner, gam1, gam2, gam3, gam4, *betas)
            diff = np.abs(np.conj(block) - rhs)
            run.record(
                float(diff.max()),
                lambda degs=degs, diff=diff: {
                    "degrees": [str(g) for g in degs],
                    "entry": _argmax_entry(diff),
                },
            )
        except MissingDataError as exc:
            run.skip_missing(exc)
    return run.result()


_CHECKS = [
    _check_dual_involution,
    _check_scalar_reality_duality,
    _check_delta_symmetry,
    _check_b_recursion,
    _check_gamma_beta_normalization,
    _check_sixj_support,
    _check_tetrahedral_symmetry,
    _check_pentagon,
    _check_orthogonality,
    _check_conjugation,
]


def validate(
    data: LWData,
    degree_samples: Sequence[GroupElement],
    tol: float = 1e-9,
    max_tuples: int = 4096,
) -> ValidationReport:
    """Run every axiom check over the closure of the sample degrees."""
    if data.signature.is_finite and not data.singular.is_empty_on(data.signature):
        raise DomainError(
            "singular set is not small: a finite group is covered by"
            " translates of any nonempty subset"
        )
    closure = []
    seen = set()
    for g in degree_samples:
        for h in (g, -g):
            data.check_degree(h)
            if h not in seen:
                seen.add(h)
                closure.append(h)
    closure.sort(key=str)
    if not closure:
        raise DomainError("no degree samples supplied")
    sl = _Slice(data, closure, max_tuples)
    results = [check(sl, tol) for check in _CHECKS]
    return ValidationReport(results, closure, tol, max_tuples)
