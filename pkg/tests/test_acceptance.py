"""End-to-end acceptance gate.

Each test prints one PASS/FAIL line for its criterion (run with ``-s``
to see them).  Criteria 1-6 are computed once against builtin data with
the P(3,2) slice recorded; criterion 7 re-ingests the recorded slice as
a file-format table and requires a bit-identical transcript.
"""

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import pytest

from rlw import (
    BuiltinFamily,
    QMODZ,
    RecordingData,
    StringNetModel,
    TableData,
    coloring_from_holonomy,
    gauge_shift,
    is_admissible,
    parse_surface,
    validate,
)

TOL_AXIOMS = 1e-12
TOL_ALGEBRA = 1e-9
TOL_SPECTRUM = 1e-7
TOL_PAIRING = 1e-8

DEGREE_SAMPLES = ("1/5", "2/5", "1/7", "3/7")
SEED = 2026


def q(value):
    return QMODZ.element(Fraction(value))


@dataclass
class Outcome:
    ok: bool
    line: str
    transcript: dict


class Harness:
    """Caches models per (family, surface, holonomy, convention)."""

    def __init__(self, p32_provider):
        self.families = {
            "P21": BuiltinFamily("P", 2, 1.0),
            "P32": p32_provider,
            "M21": BuiltinFamily("M", 2, 1.0),
            "F212": BuiltinFamily("F", 2, 1.0, 2.0),
        }
        self._models = {}

    def model(self, fam, surface, holonomy, strict=False):
        key = (fam, surface, holonomy, strict)
        if key not in self._models:
            graph = parse_surface(surface)
            coloring = coloring_from_holonomy(graph, tuple(q(h) for h in holonomy))
            self._models[key] = StringNetModel(
                self.families[fam], coloring, strict=strict, probe=q("1/4")
            )
        return self._models[key]


# systems shared by criteria 2, 3 and 5
SYSTEMS = [
    ("P21", "torus:theta", ("1/5", "2/5"), False),
    ("P32", "torus:theta", ("1/5", "2/5"), False),
    ("P21", "torus:grid:2", ("1/7", "2/7"), True),
    ("P32", "torus:grid:2", ("1/7", "2/7"), True),
]


def criterion_axioms(h: Harness) -> Outcome:
    transcript = {}
    worst = 0.0
    for name, family in h.families.items():
        report = validate(family, [q(d) for d in DEGREE_SAMPLES], tol=TOL_AXIOMS)
        transcript[name] = {
            "passed": report.passed,
            "max_residual": report.max_residual,
            "checks": {c.name: c.residual for c in report.checks},
        }
        worst = max(worst, report.max_residual)
    ok = all(t["passed"] for t in transcript.values()) and worst <= TOL_AXIOMS
    line = f"criterion 1 axiom suite: max residual {worst:.3e} (tol {TOL_AXIOMS:.0e})"
    return Outcome(ok, line, transcript)


def criterion_projector_algebra(h: Harness) -> Outcome:
    transcript = {}
    worst = 0.0
    for fam, surface, hol, strict in SYSTEMS:
        model = h.model(fam, surface, hol, strict)
        plaquettes = model.graph.plaquettes
        bs = [model.plaquette_B(p) for p in plaquettes]
        qs = [model.vertex_Q(v) for v in range(model.graph.num_vertices)]
        rows = {
            "idempotency": max(
                np.linalg.norm((b @ b - b).matrix) for b in bs
            ),
            "plaquette_commutation": max(
                (
                    np.linalg.norm((a @ b - b @ a).matrix)
                    for i, a in enumerate(bs)
                    for b in bs[i + 1 :]
                ),
                default=0.0,
            ),
            "vertex_commutation": max(
                np.linalg.norm((b @ d - d @ b).matrix) for b in bs for d in qs
            ),
        }
        g = q("1/4")
        dev = 0.0
        for p in plaquettes:
            raised = model.plaquette_Bg(p, g)
            lowered = model.plaquette_Bg(p, -g, gauge_shift(model.coloring, p, -g))
            dev = max(dev, np.linalg.norm(raised.adjoint().matrix - lowered.matrix))
        rows["adjoint_degree_flip"] = dev
        g1, g2 = q("1/7"), q("1/4")
        second = model.plaquette_Bg(plaquettes[0], g2)
        first = model.plaquette_Bg(
            plaquettes[0], g1, gauge_shift(model.coloring, plaquettes[0], -g2)
        )
        combined = model.plaquette_Bg(plaquettes[0], g1 + g2)
        rows["degree_composition"] = np.linalg.norm(
            (first @ second).matrix - combined.matrix
        )
        rows["probe_independence"] = np.linalg.norm(
            model.plaquette_B(plaquettes[0], g=q("1/4")).matrix
            - model.plaquette_B(plaquettes[0], g=q("3/4")).matrix
        )
        rows = {k: float(v) for k, v in rows.items()}
        transcript[f"{fam} {surface}"] = rows
        worst = max(worst, max(rows.values()))
    ok = worst <= TOL_ALGEBRA
    line = f"criterion 2 projector algebra: max residual {worst:.3e} (tol {TOL_ALGEBRA:.0e})"
    return Outcome(ok, line, transcript)


def criterion_spectrum(h: Harness) -> Outcome:
    transcript = {}
    ok = True
    worst = 0.0
    for fam, surface, hol, strict in SYSTEMS:
        model = h.model(fam, surface, hol, strict)
        values = np.linalg.eigvals(model.hamiltonian().matrix)
        integrality = float(max(abs(v - round(v.real)) for v in values))
        rounded = np.array([round(v.real) for v in values])
        mult0 = int(np.sum(rounded == 0))
        gap = float(min(v.real for v in values if round(v.real) != 0))
        ground = model.ground_dim()
        entry = {
            "integrality": integrality,
            "mult0": mult0,
            "ground_dim": ground,
            "gap": gap,
            "nonnegative": bool(rounded.min() >= 0),
        }
        transcript[f"{fam} {surface}"] = entry
        worst = max(worst, integrality)
        ok = ok and (
            integrality <= TOL_SPECTRUM
            and mult0 == ground
            and gap >= 1 - TOL_SPECTRUM
            and entry["nonnegative"]
        )
    line = f"criterion 3 integer spectrum: max integrality residual {worst:.3e} (tol {TOL_SPECTRUM:.0e})"
    return Outcome(ok, line, transcript)


def criterion_pseudo_hermiticity(h: Harness) -> Outcome:
    transcript = {}
    worst = 0.0
    rng = np.random.default_rng(SEED)
    for name in h.families:
        model = h.model(name, "torus:theta", ("1/5", "2/5"))
        space = model.space()
        ham = model.hamiltonian().matrix
        eta = space.eta
        similarity = float(
            np.linalg.norm((ham * eta[None, :]) / eta[:, None] - ham.conj().T)
        )
        pair_dev = 0.0
        for _ in range(100):
            psi = rng.standard_normal(space.dim) + 1j * rng.standard_normal(space.dim)
            phi = rng.standard_normal(space.dim) + 1j * rng.standard_normal(space.dim)
            pair_dev = max(
                pair_dev,
                abs(
                    space.inner_indef(psi, ham @ phi)
                    - space.inner_indef(ham @ psi, phi)
                ),
            )
        transcript[name] = {"similarity": similarity, "pairing": float(pair_dev)}
        worst = max(worst, similarity, pair_dev)
    ok = worst <= TOL_PAIRING
    line = f"criterion 4 pseudo-Hermiticity: max residual {worst:.3e} (tol {TOL_PAIRING:.0e})"
    return Outcome(ok, line, transcript)


def criterion_degeneracy(h: Harness) -> Outcome:
    cases = [
        ("P21", "torus:theta", ("1/5", "2/5"), False, 4),
        ("P21", "torus:theta", ("1/7", "3/7"), False, 4),
        ("P21", "torus:grid:2", ("1/7", "2/7"), True, 4),
        ("P32", "torus:theta", ("1/5", "2/5"), False, 9),
        ("P32", "torus:theta", ("1/7", "3/7"), False, 9),
        ("P32", "torus:grid:2", ("1/7", "2/7"), True, 9),
    ]
    transcript = {}
    ok = True
    for fam, surface, hol, strict, want in cases:
        model = h.model(fam, surface, hol, strict)
        # brute-force oracle first: count zero eigenvalues densely
        values = np.linalg.eigvals(model.hamiltonian().matrix)
        dense = int(np.sum(np.abs(values) < 0.5))
        traced = model.ground_dim()
        entry = {"dense": dense, "trace": traced, "expected": want}
        transcript[f"{fam} {surface} {','.join(hol)}"] = entry
        ok = ok and dense == traced == want
    line = "criterion 5 torus degeneracy: dense and trace counts "
    line += "agree at N^2 for N in {2,3}" if ok else "DISAGREE"
    return Outcome(ok, line, transcript)


def criterion_invariance(h: Harness) -> Outcome:
    transcript = {}
    ok = True
    # matched holonomies across the two torus graphs
    for fam in ("P21", "P32"):
        coarse = h.model(fam, "torus:theta", ("1/7", "2/7")).ground_dim()
        fine = h.model(fam, "torus:grid:2", ("1/7", "2/7"), strict=True).ground_dim()
        transcript[f"{fam} matched"] = {"theta": coarse, "grid": fine}
        ok = ok and coarse == fine
    # ten random gauge shifts with admissible targets, through the provider
    rng = np.random.default_rng(SEED)
    model = h.model("P32", "torus:theta", ("1/5", "2/5"))
    base = model.ground_dim()
    coloring = model.coloring
    plaquettes = model.graph.plaquettes
    shifts = []
    while len(shifts) < 10:
        p = plaquettes[int(rng.integers(0, len(plaquettes)))]
        g = q(Fraction(int(rng.integers(1, 31)), 31))
        target = gauge_shift(coloring, p, g)
        if not is_admissible(target, model.data.singular):
            continue
        shifted = StringNetModel(model.data, target, probe=q("1/4"))
        dim = shifted.ground_dim()
        shifts.append({"plaquette": p.index, "degree": str(g), "ground_dim": dim})
        ok = ok and dim == base
        coloring = target
    transcript["gauge_shifts"] = {"base": base, "shifts": shifts}
    # plaquette moves stay full rank on the ground sector
    ranks = {}
    for fam in ("P21", "P32"):
        m = h.model(fam, "torus:theta", ("1/5", "2/5"))
        proj = m.ground_projector().matrix
        u, sing, _ = np.linalg.svd(proj)
        ground = u[:, sing > 0.5]
        block = m.plaquette_Bg(0, q("1/4")).matrix @ ground
        rank = int(np.linalg.matrix_rank(block, tol=1e-9))
        ranks[fam] = {"ground": int(ground.shape[1]), "rank": rank}
        ok = ok and rank == ground.shape[1]
    transcript["ground_sector_rank"] = ranks
    line = "criterion 6 topological invariance: "
    line += "matched dims, 10 shifts, full rank" if ok else "FAILED"
    return Outcome(ok, line, transcript)


CRITERIA = [
    ("axioms", criterion_axioms),
    ("projector_algebra", criterion_projector_algebra),
    ("spectrum", criterion_spectrum),
    ("pseudo_hermiticity", criterion_pseudo_hermiticity),
    ("degeneracy", criterion_degeneracy),
    ("invariance", criterion_invariance),
]


def run_criteria(p32_provider):
    h = Harness(p32_provider)
    outcomes = {}
    for name, fn in CRITERIA:
        try:
            outcomes[name] = fn(h)
        except Exception as exc:  # a crash is a failed criterion, not a crashed suite
            outcomes[name] = Outcome(False, f"{name} crashed: {exc}", {"error": str(exc)})
    return outcomes


@pytest.fixture(scope="module")
def primary():
    recorder = RecordingData(BuiltinFamily("P", 3, 2.0))
    return recorder, run_criteria(recorder)


def _report(outcome: Outcome):
    print(("PASS " if outcome.ok else "FAIL ") + outcome.line)
    assert outcome.ok, outcome.line


def test_criterion_1_axiom_suite(primary):
    _report(primary[1]["axioms"])


def test_criterion_2_projector_algebra(primary):
    _report(primary[1]["projector_algebra"])


def test_criterion_3_integer_spectrum(primary):
    _report(primary[1]["spectrum"])


def test_criterion_4_pseudo_hermiticity(primary):
    _report(primary[1]["pseudo_hermiticity"])


def test_criterion_5_torus_degeneracy(primary):
    _report(primary[1]["degeneracy"])


def test_criterion_6_topological_invariance(primary):
    _report(primary[1]["invariance"])


def test_criterion_7_ingestion_round_trip(primary):
    recorder, first = primary
    table = TableData.from_dict(recorder.export_table().to_dict())
    second = run_criteria(table)
    first_text = json.dumps(
        {k: v.transcript for k, v in first.items()}, sort_keys=True
    )
    second_text = json.dumps(
        {k: v.transcript for k, v in second.items()}, sort_keys=True
    )
    ok = first_text == second_text and all(o.ok for o in second.values())
    print(
        ("PASS " if ok else "FAIL ")
        + "criterion 7 ingestion round trip: re-ingested table reproduces"
        " criteria 1-6 bit-identically"
    )
    assert all(o.ok for o in second.values()), "re-ingested run failed a criterion"
    assert first_text == second_text, "transcripts differ between providers"
