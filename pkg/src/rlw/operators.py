"""Vertex and plaquette operators, the Hamiltonian, and its spectrum.

The plaquette term is built from half-plaquette moves B_p^s that fuse a
degree-g string s into the boundary walk of p.  Walking the face orbit,
each corner contributes one 6j symbol coupling the old walk label, the
new walk label, the outward leg label and the string, together with a
d-weight for the new label; vertex slots ride along the walk, entering
at the stored slot on the first visit to a vertex and leaving at the
output slot on the last.  Summing over all new labelings with degrees
lowered by deg(s) gives a map from the space over Phi to the space over
the gauge-shifted coloring.

Edges the walk traverses twice (both darts on one face) are reprocessed:
the second visit reads the label produced by the first, dualized, and
its own output sets the final edge label.  A leg that is itself a walk
edge contributes whichever of its old or new labels has the degree the
corner needs; the mismatch of old and new degrees (by deg(s), nonzero
for generic s) makes the choice unambiguous.

B_p^g sums the moves over s with b-weights; B_p = B_p^g B_p^(-g) for
any probe degree g that keeps every intermediate coloring admissible,
and is a projector independent of the probe.  The Hamiltonian counts
violated vertex and plaquette projectors, so its spectrum is found by
jointly splitting the space along the commuting family.
"""

from __future__ import annotations

import itertools
from typing import Iterator, Optional, Sequence, Union

import numpy as np

from .data import LWData, Label
from .errors import (
    AdmissibilityError,
    DataFormatError,
    DomainError,
    GaugeAdmissibilityError,
    InstabilityError,
    MissingDataError,
    ProbeSearchError,
)
from .group import GroupElement
from .states import LinearOperator, StateSpace
from .surface import Coloring, Plaquette, gauge_shift, is_admissible

__all__ = ["StringNetModel", "probe_candidates", "choose_probe"]


def probe_candidates(
    data: LWData, coloring: Coloring, limit: int = 64
) -> Iterator[GroupElement]:
    """Degrees g keeping g and every edge degree +-g generic and labeled."""
    degrees = set(coloring.values)
    for g in itertools.islice(data.probe_degrees(), limit):
        if g.is_zero or not data.singular.is_generic(g):
            continue
        try:
            data.labels(g), data.labels(-g)
            ok = True
            for phi in degrees:
                for shifted in (phi + g, phi - g):
                    if not data.singular.is_generic(shifted):
                        ok = False
                        break
                    data.labels(shifted)
                if not ok:
                    break
        except MissingDataError:
            continue
        if ok:
            yield g


def choose_probe(data: LWData, coloring: Coloring) -> GroupElement:
    for g in probe_candidates(data, coloring):
        return g
    raise ProbeSearchError(
        "no probe degree keeps all shifted edge degrees generic"
    )


class _Corner:
    """Static data for one corner of a plaquette walk."""

    __slots__ = ("pos", "vertex", "leg", "leg_pos", "leg_direct")

    def __init__(self, pos, vertex, leg, leg_pos, leg_direct):
        self.pos = pos                # corner i sits at the head of dart t_i
        self.vertex = vertex
        self.leg = leg                # third dart at the vertex, pointing out
        self.leg_pos = leg_pos        # walk position of the leg edge, if any
        self.leg_direct = leg_direct  # True when the leg dart is t_m itself


class _Walk:
    """Coloring-independent combinatorics of one plaquette boundary."""

    def __init__(self, graph, plaquette: Plaquette):
        darts = plaquette.darts
        n = len(darts)
        pos_of_dart = {h: i for i, h in enumerate(darts)}
        self.darts = darts
        self.edges = plaquette.edges
        self.first = []   # position of the first traversal of this edge
        seen = {}
        for i, e in enumerate(self.edges):
            self.first.append(seen.setdefault(e, i))
        self.corners = []
        for i, t in enumerate(darts):
            arrive = t ^ 1
            depart = graph.rho(arrive)
            leg = graph.rho(depart)
            if darts[(i + 1) % n] != depart:
                raise InstabilityError("face walk is not rotation-consistent")
            if leg // 2 in (t // 2, depart // 2):
                raise DataFormatError(
                    "plaquette touches a vertex with a repeated edge;"
                    " such graphs are not supported"
                )
            if leg in pos_of_dart:
                leg_pos, leg_direct = pos_of_dart[leg], True
            elif leg ^ 1 in pos_of_dart:
                leg_pos, leg_direct = pos_of_dart[leg ^ 1], False
            else:
                leg_pos, leg_direct = None, None
            self.corners.append(
                _Corner(i, graph.vertex_of(arrive), leg, leg_pos, leg_direct)
            )
        self.vertices = sorted({c.vertex for c in self.corners})
        self.visits = {v: [] for v in self.vertices}
        for c in self.corners:
            self.visits[c.vertex].append(c.pos)


class StringNetModel:
    """All operators of one model over a fixed base coloring."""

    def __init__(
        self,
        data: LWData,
        coloring: Coloring,
        strict: bool = False,
        dim_cap: int = 8192,
        probe: Optional[GroupElement] = None,
    ):
        if not coloring.is_cocycle():
            raise AdmissibilityError("base coloring violates a vertex condition")
        if not is_admissible(coloring, data.singular):
            edge = next(
                e
                for e, value in enumerate(coloring.values)
                if not data.singular.is_generic(value)
            )
            raise AdmissibilityError(
                f"edge {edge} carries singular degree {coloring.values[edge]}"
            )
        self.data = data
        self.coloring = coloring
        self.graph = coloring.graph
        self.strict = strict
        self.dim_cap = dim_cap
        self._probe = probe
        self._spaces = {}
        self._walks = {}
        self._bg_cache = {}
        self._b_cache = {}

    # -- plumbing ------------------------------------------------------------

    @property
    def probe(self) -> GroupElement:
        if self._probe is None:
            self._probe = choose_probe(self.data, self.coloring)
        return self._probe

    def space(self, coloring: Optional[Coloring] = None) -> StateSpace:
        col = coloring or self.coloring
        key = col.values
        if key not in self._spaces:
            self._spaces[key] = StateSpace(
                self.data, col, strict=self.strict, dim_cap=self.dim_cap
            )
        return self._spaces[key]

    def _plaquette(self, p: Union[int, Plaquette]) -> Plaquette:
        return self.graph.plaquettes[p] if isinstance(p, int) else p

    def _walk(self, p: Plaquette) -> _Walk:
        if p.index not in self._walks:
            self._walks[p.index] = _Walk(self.graph, p)
        return self._walks[p.index]

    # -- vertex term -----------------------------------------------------------

    def vertex_Q(
        self, v: int, coloring: Optional[Coloring] = None
    ) -> LinearOperator:
        space = self.space(coloring)
        diag = np.array([1.0 if st[1][v] >= 1 else 0.0 for st in space.basis])
        return LinearOperator(space, space, np.diag(diag).astype(complex))

    # -- half-plaquette moves ----------------------------------------------------

    def plaquette_Bs(
        self, p: Union[int, Plaquette], s: Label, coloring: Optional[Coloring] = None
    ) -> LinearOperator:
        p = self._plaquette(p)
        col = coloring or self.coloring
        src = self.space(col)
        target = gauge_shift(col, p, -s.degree)
        if not is_admissible(target, self.data.singular):
            raise GaugeAdmissibilityError(
                f"gauge shift by {-s.degree} at plaquette {p.index}"
                " hits a singular degree"
            )
        dst = self.space(target)
        matrix = np.zeros((dst.dim, src.dim), dtype=complex)
        self._accumulate_Bs(p, s, src, dst, matrix, 1.0)
        return LinearOperator(src, dst, matrix)

    def plaquette_Bg(
        self,
        p: Union[int, Plaquette],
        g: GroupElement,
        coloring: Optional[Coloring] = None,
    ) -> LinearOperator:
        """Sum of b(s) B_p^s over the simple objects s of degree g."""
        p = self._plaquette(p)
        col = coloring or self.coloring
        key = (p.index, g, col.values)
        if key in self._bg_cache:
            return self._bg_cache[key]
        src = self.space(col)
        target = gauge_shift(col, p, -g)
        if not is_admissible(target, self.data.singular):
            raise GaugeAdmissibilityError(
                f"gauge shift by {-g} at plaquette {p.index} hits a singular degree"
            )
        dst = self.space(target)
        matrix = np.zeros((dst.dim, src.dim), dtype=complex)
        for s in self.data.labels(g):
            self._accumulate_Bs(p, s, src, dst, matrix, s.b)
        op = LinearOperator(src, dst, matrix)
        self._bg_cache[key] = op
        return op

    def plaquette_B(
        self,
        p: Union[int, Plaquette],
        coloring: Optional[Coloring] = None,
        g: Optional[GroupElement] = None,
    ) -> LinearOperator:
        """The plaquette projector B_p^g B_p^(-g) at a probe degree g."""
        p = self._plaquette(p)
        col = coloring or self.coloring
        g = g if g is not None else self.probe
        key = (p.index, g, col.values)
        if key in self._b_cache:
            return self._b_cache[key]
        lower = self.plaquette_Bg(p, -g, col)
        mid = gauge_shift(col, p, g)
        raise_ = self.plaquette_Bg(p, g, mid)
        op = raise_ @ lower
        self._b_cache[key] = op
        return op

    # -- the walk algorithm -----------------------------------------------------

    def _accumulate_Bs(self, p, s, src, dst, matrix, weight):
        """Add weight * B_p^s to matrix, column by column."""
        data = self.data
        walk = self._walk(p)
        n = len(walk.darts)
        sdeg = s.degree
        col_values = src.coloring.values

        # degree bookkeeping is choice-independent: input-at-visit and
        # output degrees per position, then the old/new call per leg
        o_deg = [None] * n
        for i, t in enumerate(walk.darts):
            if walk.first[i] == i:
                v = col_values[t // 2]
                o_deg[i] = v if t % 2 == 0 else -v
        for i in range(n):
            if walk.first[i] != i:
                o_deg[i] = sdeg - o_deg[walk.first[i]]
        n_deg = [phi - sdeg for phi in o_deg]
        try:
            candidates = [data.labels(d) for d in n_deg]
        except DomainError as exc:
            # stored degrees can survive a shift (an edge walked both ways)
            # while the walk labels still pass through a singular degree
            raise GaugeAdmissibilityError(str(exc)) from exc

        leg_uses_new = [False] * n
        deps = [set() for _ in range(n)]
        for c in walk.corners:
            i = c.pos
            nxt = (i + 1) % n
            deps[i].update((i, nxt))
            if walk.first[nxt] != nxt:
                deps[i].add(walk.first[nxt])
            if walk.first[i] != i:
                deps[i].add(walk.first[i])
            if c.leg_pos is None:
                continue
            m, sign = c.leg_pos, (1 if c.leg_direct else -1)
            need = o_deg[i] - o_deg[nxt]
            if need == sign * o_deg[m]:
                if walk.first[m] != m:
                    deps[i].add(walk.first[m])
            elif need == sign * n_deg[m]:
                leg_uses_new[i] = True
                deps[i].add(m)
            else:
                raise InstabilityError(
                    "no leg label of the required degree at corner"
                    f" {i} of plaquette {p.index}"
                )
        ready_at = [[] for _ in range(n)]
        for i in range(n):
            ready_at[max(deps[i])].append(i)

        general = data.mult_bound > 1
        walk_vs = walk.vertices
        chosen = [None] * n

        def o_label(i, state):
            if walk.first[i] == i:
                return src.label_along(state, walk.darts[i])
            return data.dual(chosen[walk.first[i]])

        def leg_label(c, state):
            if c.leg_pos is None:
                return src.label_along(state, c.leg)
            m = c.leg_pos
            lab = chosen[m] if leg_uses_new[c.pos] else o_label(m, state)
            return lab if c.leg_direct else data.dual(lab)

        def corner_labels(c, state):
            i = c.pos
            nxt = (i + 1) % n
            return (
                chosen[i],
                s,
                o_label(i, state),
                data.dual(o_label(nxt, state)),
                leg_label(c, state),
                data.dual(chosen[nxt]),
            )

        last = {e: i for i, e in enumerate(walk.edges)}

        def out_state(state):
            labels = list(state[0])
            for i, t in enumerate(walk.darts):
                if last[t // 2] != i:
                    continue  # an edge's final label comes from its last visit
                lab = chosen[i] if t % 2 == 0 else data.dual(chosen[i])
                labels[t // 2] = data.label_index(lab)
            return tuple(labels)

        for col_idx, state in enumerate(src.basis):
            slots = state[1]
            if any(slots[v] == 0 for v in walk_vs):
                continue
            if general:
                self._dfs_general(
                    p, s, src, dst, matrix, weight, walk, state, col_idx,
                    candidates, ready_at, chosen, corner_labels, out_state,
                )
                continue

            def rec(j, amp):
                if j == n:
                    out_labels = out_state(state)
                    out_slots = tuple(
                        1 if v in walk.visits else slots[v]
                        for v in range(len(slots))
                    )
                    row = dst.index.get((out_labels, out_slots))
                    if row is None:
                        raise InstabilityError(
                            "plaquette move left the target space"
                        )
                    matrix[row, col_idx] += weight * amp
                    return
                for lab in candidates[j]:
                    chosen[j] = lab
                    branch = amp
                    for ci in ready_at[j]:
                        c = walk.corners[ci]
                        val = data.sixj(corner_labels(c, state), (1, 1, 1, 1))
                        if val == 0:
                            branch = 0
                            break
                        branch *= chosen[ci].d * val
                    if branch != 0:
                        rec(j + 1, branch)

            rec(0, 1.0 + 0j)

    def _dfs_general(
        self, p, s, src, dst, matrix, weight, walk, state, col_idx,
        candidates, ready_at, chosen, corner_labels, out_state,
    ):
        """Slot-multiplicity version: contract the corner blocks at each leaf.

        The A slots chain cyclically around the walk and the C slots chain
        per vertex across its visits; first-visit C slots are sliced at the
        stored value and last-visit ones stay free as the output axes.
        """
        data = self.data
        n = len(walk.darts)
        mb = data.mult_bound
        slots = state[1]
        pool = iter("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
        a_letter = [next(pool) for _ in range(n)]
        link_letter = {}
        out_letter = {}
        for v in walk.vertices:
            seq = walk.visits[v]
            for r in range(len(seq) - 1):
                link_letter[seq[r], "out"] = link_letter[seq[r + 1], "in"] = next(pool)
            out_letter[v] = next(pool)

        subs, fixed_in = [], {}
        for c in walk.corners:
            i = c.pos
            seq = walk.visits[c.vertex]
            sub = a_letter[i]
            if i == seq[0]:
                fixed_in[i] = slots[c.vertex] - 1
            else:
                sub += link_letter[i, "in"]
            sub += out_letter[c.vertex] if i == seq[-1] else link_letter[i, "out"]
            sub += a_letter[(i + 1) % n]
            subs.append(sub)
        spec = ",".join(subs) + "->" + "".join(out_letter[v] for v in walk.vertices)

        def block(c):
            js = corner_labels(c, state)
            arr = np.zeros((mb,) * 4, dtype=complex)
            for idx in np.ndindex(arr.shape):
                arr[idx] = data.sixj(js, tuple(a + 1 for a in idx))
            arr *= chosen[c.pos].d
            if c.pos in fixed_in:
                arr = arr[:, fixed_in[c.pos], :, :]
            return arr

        def rec(j, acc):
            if j == n:
                ordered = [arr for _, arr in sorted(acc, key=lambda t: t[0])]
                amps = np.einsum(spec, *ordered)
                out_labels = out_state(state)
                for idx in np.ndindex(amps.shape):
                    amp = amps[idx]
                    if amp == 0:
                        continue
                    out_slots = list(slots)
                    for v, a in zip(walk.vertices, idx):
                        out_slots[v] = a + 1
                    row = dst.index.get((out_labels, tuple(out_slots)))
                    if row is None:
                        raise InstabilityError(
                            "plaquette move left the target space"
                        )
                    matrix[row, col_idx] += weight * amp
                return
            for lab in candidates[j]:
                chosen[j] = lab
                grown = acc
                dead = False
                for ci in ready_at[j]:
                    arr = block(walk.corners[ci])
                    if not arr.any():
                        dead = True
                        break
                    grown = grown + [(ci, arr)]
                if not dead:
                    rec(j + 1, grown)

        rec(0, [])

    # -- assembled model ---------------------------------------------------------

    def hamiltonian(self, coloring: Optional[Coloring] = None) -> LinearOperator:
        col = coloring or self.coloring
        space = self.space(col)
        ident = LinearOperator.identity(space)
        h = LinearOperator.zero(space, space)
        for p in self.graph.plaquettes:
            h = h + (ident - self.plaquette_B(p, col))
        for v in range(self.graph.num_vertices):
            h = h + (ident - self.vertex_Q(v, col))
        return h

    def ground_projector(self, coloring: Optional[Coloring] = None) -> LinearOperator:
        col = coloring or self.coloring
        space = self.space(col)
        op = LinearOperator.identity(space)
        for p in self.graph.plaquettes:
            op = self.plaquette_B(p, col) @ op
        for v in range(self.graph.num_vertices):
            op = self.vertex_Q(v, col) @ op
        return op

    def ground_dim(
        self, coloring: Optional[Coloring] = None, tol: float = 1e-9
    ) -> int:
        proj = self.ground_projector(coloring)
        residual = np.linalg.norm((proj @ proj - proj).matrix)
        if residual > tol * max(1.0, np.linalg.norm(proj.matrix)):
            raise InstabilityError(
                f"ground projector is not idempotent (residual {residual:.3e})"
            )
        trace = np.trace(proj.matrix)
        dim = round(trace.real)
        if abs(trace - dim) > max(tol, 1e-7 * max(1, abs(trace))):
            raise InstabilityError(f"projector trace {trace} is not near an integer")
        return int(dim)

    def spectrum(
        self, coloring: Optional[Coloring] = None, tol: float = 1e-8
    ) -> dict:
        """Energy -> multiplicity by joint splitting along the projectors."""
        col = coloring or self.coloring
        space = self.space(col)
        projectors = [self.plaquette_B(p, col) for p in self.graph.plaquettes]
        projectors += [self.vertex_Q(v, col) for v in range(self.graph.num_vertices)]
        sectors = [(np.eye(space.dim, dtype=complex), 0)]
        for proj in projectors:
            updated = []
            for basis, energy in sectors:
                r = basis.conj().T @ (proj.matrix @ basis)
                k = basis.shape[1]
                u, sing, _ = np.linalg.svd(r)
                rank = int(np.sum(sing > tol))
                u2, sing2, _ = np.linalg.svd(np.eye(k) - r)
                corank = int(np.sum(sing2 > tol))
                if rank + corank != k:
                    raise InstabilityError(
                        "projector eigenspaces do not fill a joint sector"
                    )
                if rank:
                    updated.append((basis @ u[:, :rank], energy))
                if corank:
                    updated.append((basis @ u2[:, :corank], energy + 1))
            sectors = updated
        out = {}
        for basis, energy in sectors:
            out[energy] = out.get(energy, 0) + basis.shape[1]
        if sum(out.values()) != space.dim:
            raise InstabilityError("sector dimensions do not add up")
        return out
