"""Perfect fractional matchings: entropy, normality, scaling, shifts.

A perfect fractional matching assigns nonnegative weights to the arcs of a
digraph so that every vertex has unit outgoing and unit incoming weight.
The maximum-entropy matching is computed by alternating proportional
scaling of the rows and columns of the support matrix; the scaled weights
factor as x_{vw} = r_v * c_w, which certifies optimality because the
entropy objective is strictly concave over the unit-sum polytope.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InputError, ParseError, ProcedureError
from .graphs import Digraph, epsilon_of

ROWSUM_TOL = 1e-9
SOLVER_TOL = 1e-10
SHIFT_ENTROPY_TOL = 1e-12


def _support_mask(g: Digraph) -> np.ndarray:
    mask = np.zeros((g.n, g.n), dtype=bool)
    for u, v in g.edges:
        mask[u, v] = True
    return mask


class PerfectFractionalMatching:
    """Immutable arc weighting with unit out- and in-sums at every vertex."""

    __slots__ = ("host", "weights")

    def __init__(self, host: Digraph, weights: np.ndarray, tol: float = ROWSUM_TOL):
        w = np.array(weights, dtype=float)
        n = host.n
        if w.shape != (n, n):
            raise InputError(f"weight matrix must be {n}x{n}, got {w.shape}")
        if np.any(w < -1e-15):
            raise InputError("negative arc weight")
        w[w < 0] = 0.0
        off = ~_support_mask(host)
        if np.any(w[off] != 0.0):
            raise InputError("nonzero weight on a non-arc")
        if n > 0:
            bad_out = np.abs(w.sum(axis=1) - 1.0)
            bad_in = np.abs(w.sum(axis=0) - 1.0)
            worst = float(max(bad_out.max(), bad_in.max()))
            if worst > tol:
                raise InputError(
                    f"unit-sum invariant violated: max residual {worst:.3e} > {tol}"
                )
        w.setflags(write=False)
        self.host = host
        self.weights = w

    @property
    def n(self) -> int:
        return self.host.n

    def weight(self, u: int, v: int) -> float:
        return float(self.weights[u, v])

    def support_arcs(self) -> list[tuple[int, int]]:
        return sorted(self.host.edges)

    def __repr__(self) -> str:
        return f"PerfectFractionalMatching(n={self.n}, m={self.host.m})"


PFM = PerfectFractionalMatching


def matching_entropy(x: PFM) -> float:
    """h(x) = sum over arcs of x_e log2(1/x_e), in bits."""
    w = x.weights
    pos = w > 0
    return float(-(w[pos] * np.log2(w[pos])).sum())


def vertex_entropy(x: PFM, v: int, side: str) -> float:
    """Entropy of the outgoing (or incoming) weight distribution at v."""
    if not (0 <= v < x.n):
        raise InputError(f"unknown vertex id {v}")
    if side == "out":
        row = x.weights[v]
    elif side == "in":
        row = x.weights[:, v]
    else:
        raise InputError(f"side must be 'out' or 'in', got {side!r}")
    pos = row > 0
    return float(-(row[pos] * np.log2(row[pos])).sum())


def subset_entropy(x: PFM, arcs: Iterable[tuple[int, int]]) -> float:
    total = 0.0
    for u, v in arcs:
        if not x.host.has_arc(u, v):
            raise InputError(f"arc ({u},{v}) not in host")
        w = x.weights[u, v]
        if w > 0:
            total -= w * math.log2(w)
    return float(total)


@dataclass(frozen=True)
class NormalityReport:
    """Smallest b with 1/(bn) <= x_e <= b/n on every arc of the host."""

    b_min: float
    attaining: tuple[tuple[int, int], ...]
    support_gaps: tuple[tuple[int, int], ...]  # host arcs carrying zero weight

    def within(self, b: float, slack: float = 1e-9) -> bool:
        return self.b_min <= b * (1 + slack)


def normality(x: PFM) -> NormalityReport:
    n = x.n
    gaps = []
    b_min = 1.0
    per_arc: list[tuple[float, tuple[int, int]]] = []
    for u, v in x.support_arcs():
        w = x.weights[u, v]
        if w == 0.0:
            gaps.append((u, v))
            continue
        b_e = max(n * w, 1.0 / (n * w))
        per_arc.append((b_e, (u, v)))
        b_min = max(b_min, b_e)
    if gaps:
        return NormalityReport(
            b_min=math.inf, attaining=tuple(gaps), support_gaps=tuple(gaps)
        )
    attaining = tuple(e for b_e, e in per_arc if b_e >= b_min * (1 - 1e-12))
    return NormalityReport(b_min=b_min, attaining=attaining, support_gaps=())


@dataclass(frozen=True)
class ScalingCertificate:
    row_factors: tuple[float, ...]
    col_factors: tuple[float, ...]
    sum_residual: float
    product_residual: float
    iterations: int


def max_entropy_matching(
    g: Digraph, tol: float = SOLVER_TOL, max_iters: Optional[int] = None
) -> tuple[PFM, ScalingCertificate]:
    """Maximum-entropy perfect fractional matching via alternating scaling.

    Raises ProcedureError (with the last residual) if the iteration does
    not converge, which signals that the support admits no perfect
    fractional matching or is ill-conditioned.
    """
    n = g.n
    if n == 0:
        raise InputError("empty graph has no matching")
    for v in range(n):
        if g.deg_out(v) == 0 or g.deg_in(v) == 0:
            raise InputError(f"vertex {v} has no out- or in-neighbors")
    if max_iters is None:
        max_iters = max(1000, int(10 * n * math.log(max(n, 2))) + 100)
    A = _support_mask(g).astype(float)
    r = np.ones(n)
    c = np.ones(n)
    residual = math.inf
    iters = 0
    for iters in range(1, max_iters + 1):
        rows = (A * c[None, :]).sum(axis=1) * r
        r /= rows
        cols = (A * r[:, None]).sum(axis=0) * c
        c /= cols
        w = r[:, None] * A * c[None, :]
        residual = float(
            max(np.abs(w.sum(axis=1) - 1.0).max(), np.abs(w.sum(axis=0) - 1.0).max())
        )
        if residual < tol:
            break
    else:
        raise ProcedureError(
            f"scaling did not converge in {max_iters} iterations",
            residual=residual,
            iterations=max_iters,
        )
    w = r[:, None] * A * c[None, :]
    product_residual = float(np.abs(w - r[:, None] * A * c[None, :]).max())
    x = PFM(g, w, tol=max(ROWSUM_TOL, 10 * tol))
    cert = ScalingCertificate(
        row_factors=tuple(float(v) for v in r),
        col_factors=tuple(float(v) for v in c),
        sum_residual=residual,
        product_residual=product_residual,
        iterations=iters,
    )
    return x, cert


def digraph_entropy(g: Digraph) -> float:
    """h(G), the entropy of the maximum-entropy matching."""
    x, _ = max_entropy_matching(g)
    return matching_entropy(x)


# ---------------------------------------------------------------------------
# 4-cycle shifts
# ---------------------------------------------------------------------------

def max_shift(x: PFM, cycle: tuple[int, int, int, int]) -> float:
    """Largest alpha keeping the product inequality valid after the shift."""
    v, w, u, z = cycle
    a, b_, c, d = (
        x.weights[v, w], x.weights[u, z], x.weights[u, w], x.weights[v, z]
    )
    denom = a + b_ + c + d
    if denom == 0:
        return 0.0
    alpha = (a * b_ - c * d) / denom
    return float(max(0.0, min(alpha, a, b_)))


def fourcycle_shift(
    x: PFM, cycle: tuple[int, int, int, int], alpha: float
) -> PFM:
    """Move alpha around the bipartite 4-cycle v+ w- u+ z-.

    Decreases arcs (v,w) and (u,z), increases arcs (u,w) and (v,z); all
    vertex sums are preserved exactly and entropy never decreases while
    the product inequality holds.
    """
    v, w, u, z = cycle
    if len({v, u}) < 2 or len({w, z}) < 2:
        raise InputError("cycle endpoints must be distinct on each side")
    for (a, b_) in ((v, w), (u, z), (u, w), (v, z)):
        if not x.host.has_arc(a, b_):
            raise InputError(f"arc ({a},{b_}) not in host: not a 4-cycle")
    if alpha < 0:
        raise InputError(f"alpha must be nonnegative, got {alpha}")
    xvw, xuz = x.weights[v, w], x.weights[u, z]
    xuw, xvz = x.weights[u, w], x.weights[v, z]
    if xvw * xuz < xuw * xvz - 1e-15:
        raise InputError(
            f"product inequality fails before shift: "
            f"x[{v},{w}]*x[{u},{z}] = {xvw * xuz:.6e} < "
            f"x[{u},{w}]*x[{v},{z}] = {xuw * xvz:.6e}"
        )
    if alpha > min(xvw, xuz) + 1e-15:
        raise InputError(
            f"alpha = {alpha} exceeds available weight min({xvw}, {xuz})"
        )
    nvw, nuz, nuw, nvz = xvw - alpha, xuz - alpha, xuw + alpha, xvz + alpha
    if nvw * nuz < nuw * nvz - 1e-12:
        raise InputError(
            f"product inequality fails after shift: "
            f"{nvw * nuz:.6e} < {nuw * nvz:.6e}"
        )
    if max(nuw, nvz) > 1.0 + 1e-12:
        raise InputError("shift would push a weight above 1")
    before = matching_entropy(x)
    wmat = np.array(x.weights)
    wmat[v, w] = max(nvw, 0.0)
    wmat[u, z] = max(nuz, 0.0)
    wmat[u, w] = nuw
    wmat[v, z] = nvz
    out = PFM(x.host, wmat)
    after = matching_entropy(out)
    if after < before - SHIFT_ENTROPY_TOL:
        raise ProcedureError(
            "entropy decreased across a legal shift",
            before=before, after=after,
        )
    return out


def heavy_mass(x: PFM, b: float) -> float:
    """Total weight on arcs with x_e >= b/n.

    When h(x) >= n log2(n/2) additionally asserts the 4n/log2(b) cap.
    """
    if b <= 1:
        raise InputError(f"b must exceed 1, got {b}")
    n = x.n
    mass = float(x.weights[x.weights >= b / n].sum())
    if matching_entropy(x) >= n * math.log2(n / 2.0):
        cap = 4.0 * n / math.log2(b)
        if mass > cap + 1e-9:
            raise ProcedureError(
                "heavy mass exceeds its cap under the entropy hypothesis",
                mass=mass, cap=cap,
            )
    return mass


# ---------------------------------------------------------------------------
# b-normalization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NormalizationConfig:
    b: float
    lam: float = 0.5
    c: Optional[float] = None       # claimed normality of the blend partner
    max_rounds: int = 20000

    def __post_init__(self):
        if not (0 < self.lam < 1):
            raise InputError(f"blend parameter must lie in (0,1), got {self.lam}")
        if self.c is not None and not (self.b > self.c >= 1):
            raise InputError(f"need b > c >= 1, got b={self.b}, c={self.c}")
        if self.b <= 1:
            raise InputError(f"target b must exceed 1, got {self.b}")


@dataclass(frozen=True)
class NormalizationReport:
    b_before: float
    b_after: float
    entropy_before: float
    entropy_after: float
    entropy_loss: float
    rounds: int
    blended: bool


def _heaviest_arc(w: np.ndarray, mask: np.ndarray, thr: float) -> Optional[tuple[int, int]]:
    over = np.argwhere(mask & (w > thr))
    if over.size == 0:
        return None
    vals = w[over[:, 0], over[:, 1]]
    top = vals.max()
    cand = over[vals >= top - 1e-18]
    i = np.lexsort((cand[:, 1], cand[:, 0]))[0]
    return int(cand[i, 0]), int(cand[i, 1])


def _lightest_arc(w: np.ndarray, mask: np.ndarray, thr: float) -> Optional[tuple[int, int]]:
    under = np.argwhere(mask & (w < thr))
    if under.size == 0:
        return None
    vals = w[under[:, 0], under[:, 1]]
    bot = vals.min()
    cand = under[vals <= bot + 1e-18]
    i = np.lexsort((cand[:, 1], cand[:, 0]))[0]
    return int(cand[i, 0]), int(cand[i, 1])


def normalize_to_b(
    m: PFM,
    cfg: NormalizationConfig,
    partner: Optional[PFM] = None,
) -> tuple[PFM, NormalizationReport]:
    """Produce a b-normal matching close in entropy to the input.

    Blends with a near-uniform partner and then repairs out-of-range arcs
    with weight shifts around 4-cycles, heaviest arc first; the opposite
    (gaining) arcs of each cycle are restricted to light weights, so every
    shift keeps all four arcs inside the window once they get there.
    """
    g = m.host
    n = g.n
    b = cfg.b
    h_before = matching_entropy(m)
    rep0 = normality(m)
    if rep0.within(b):
        return m, NormalizationReport(
            b_before=rep0.b_min, b_after=rep0.b_min,
            entropy_before=h_before, entropy_after=h_before,
            entropy_loss=0.0, rounds=0, blended=False,
        )
    if partner is None:
        partner, _ = max_entropy_matching(g)
    c_actual = normality(partner).b_min
    if cfg.c is not None and c_actual > cfg.c * (1 + 1e-9):
        raise InputError(
            f"blend partner is only {c_actual:.6g}-normal, claimed c={cfg.c}"
        )
    if not math.isfinite(c_actual) or c_actual >= b:
        raise ProcedureError(
            "no sufficiently normal blend partner on this host",
            partner_normality=c_actual, target_b=b,
        )
    lam = cfg.lam
    if lam < c_actual / b:
        warnings.warn(
            "blend parameter below partner-normality ratio; "
            "light arcs may stay below the window",
            stacklevel=2,
        )
    w = (1 - lam) * m.weights + lam * partner.weights
    mask = _support_mask(g)
    hi = b / n
    lo = 1.0 / (b * n)
    eps = epsilon_of(g).epsilon_float
    light_thr = (1.0 / (eps * n)) if eps > 0 else hi

    def candidate_alpha(v: int, w0: int, u: int, z: int, goal: float) -> float:
        a, b_, c_, d = w[v, w0], w[u, z], w[u, w0], w[v, z]
        denom = a + b_ + c_ + d
        astar = (a * b_ - c_ * d) / denom if denom > 0 else 0.0
        return min(goal, astar, b_ - lo, hi - c_, hi - d, a, b_)

    rounds = 0
    while rounds < cfg.max_rounds:
        heavy = _heaviest_arc(w, mask, hi + 1e-12)
        if heavy is None:
            break
        v, w0 = heavy
        goal = w[v, w0] - hi
        best = None
        best_alpha = 0.0
        for u in g.in_adj[w0]:
            if u == v or w[u, w0] > light_thr:
                continue
            for z in g.out_adj[u]:
                if z == w0 or not mask[v, z] or w[v, z] > light_thr:
                    continue
                alpha = candidate_alpha(v, w0, u, z, goal)
                if alpha > best_alpha + 1e-18:
                    best_alpha = alpha
                    best = (u, z)
        if best is None or best_alpha <= 1e-15:
            surviving = [tuple(e) for e in np.argwhere(mask & (w > hi + 1e-12))]
            raise ProcedureError(
                "no usable 4-cycle for a surviving heavy arc",
                heavy_arcs=surviving, b=b,
            )
        u, z = best
        w[v, w0] -= best_alpha
        w[u, z] -= best_alpha
        w[u, w0] += best_alpha
        w[v, z] += best_alpha
        rounds += 1
    while rounds < cfg.max_rounds:
        light = _lightest_arc(w, mask, lo - 1e-12)
        if light is None:
            break
        u, w0 = light
        goal = lo - w[u, w0]
        best = None
        best_alpha = 0.0
        # raise the light arc by making it a gainer of some cycle (v,w0,u,z)
        for v in g.in_adj[w0]:
            if v == u:
                continue
            for z in g.out_adj[u]:
                if z == w0 or not mask[v, z]:
                    continue
                a, b_, c_, d = w[v, w0], w[u, z], w[u, w0], w[v, z]
                denom = a + b_ + c_ + d
                astar = (a * b_ - c_ * d) / denom if denom > 0 else 0.0
                alpha = min(goal, astar, a - lo, b_ - lo, hi - c_, hi - d)
                if alpha > best_alpha + 1e-18:
                    best_alpha = alpha
                    best = (v, z)
        if best is None or best_alpha <= 1e-15:
            surviving = [tuple(e) for e in np.argwhere(mask & (w < lo - 1e-12))]
            raise ProcedureError(
                "no usable 4-cycle for a surviving light arc",
                light_arcs=surviving, b=b,
            )
        v, z = best
        w[v, w0] -= best_alpha
        w[u, z] -= best_alpha
        w[u, w0] += best_alpha
        w[v, z] += best_alpha
        rounds += 1
    out = PFM(g, w)
    rep1 = normality(out)
    if not rep1.within(b, slack=1e-6):
        raise ProcedureError(
            "round budget exhausted before reaching the window",
            b_after=rep1.b_min, heavy_arcs=list(rep1.attaining),
        )
    h_after = matching_entropy(out)
    return out, NormalizationReport(
        b_before=rep0.b_min, b_after=rep1.b_min,
        entropy_before=h_before, entropy_after=h_after,
        entropy_loss=h_before - h_after, rounds=rounds, blended=True,
    )


# ---------------------------------------------------------------------------
# rebalancing after vertex removal
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RebalanceReport:
    entropy: float
    target: float
    slack: float
    meets_target: bool
    passes: int


@dataclass(frozen=True)
class RebalanceResult:
    matching: PFM
    vertex_map: dict[int, int] = field(compare=False)
    new_vertex: Optional[int]
    report: RebalanceReport


def _redistribute_rows(
    w: np.ndarray, mask: np.ndarray, tol: float, max_passes: int
) -> int:
    """Equalize row sums by moving weight between rows inside one column.

    Moving weight from arc (d, z) to (t, z) changes only the out-sums of
    d and t, so column sums are untouched.
    """
    n = w.shape[0]
    passes = 0
    while passes < max_passes:
        s = w.sum(axis=1)
        if np.abs(s - 1.0).max() <= tol:
            return passes
        takers = [t for t in range(n) if s[t] < 1.0 - tol / 4]
        donors = [d for d in range(n) if s[d] > 1.0 + tol / 4]
        moved = 0.0
        for t in takers:
            need = 1.0 - s[t]
            for d in donors:
                avail = s[d] - 1.0
                if avail <= 0 or need <= 0:
                    continue
                common = [
                    z for z in range(n)
                    if mask[d, z] and mask[t, z] and w[d, z] > 0
                ]
                if not common:
                    continue
                amount = min(need, avail)
                share = amount / len(common)
                for z in common:
                    delta = min(share, w[d, z])
                    w[d, z] -= delta
                    w[t, z] += delta
                    moved += delta
                    s[d] -= delta
                    s[t] += delta
                need = 1.0 - s[t]
        passes += 1
        if moved <= tol / 16:
            break
    s = w.sum(axis=1)
    if np.abs(s - 1.0).max() > tol:
        raise ProcedureError(
            "row redistribution stalled",
            residual=float(np.abs(s - 1.0).max()), passes=passes,
        )
    return passes


def rebalance_after_removal(
    x: PFM,
    removed: Iterable[int],
    attach_out: Optional[Sequence[int]] = None,
    attach_in: Optional[Sequence[int]] = None,
    tol: float = ROWSUM_TOL,
    max_passes: int = 500,
) -> RebalanceResult:
    """Rebuild a matching after deleting vertices, optionally attaching a
    fresh vertex whose neighborhoods are given in surviving (old) ids.

    Surviving weights are kept, the fresh vertex starts uniform on its
    arcs, everything is rescaled to total n', and residual unit-sum
    deviations are pushed along length-2 paths (out- and in-side repairs
    are independent because each preserves the other side's sums).
    """
    g = x.host
    removed = set(removed)
    for v in removed:
        if not (0 <= v < g.n):
            raise InputError(f"unknown vertex id {v}")
    if (attach_out is None) != (attach_in is None):
        raise InputError("attach_out and attach_in must be given together")
    keep = [v for v in range(g.n) if v not in removed]
    if not keep:
        raise InputError("cannot remove every vertex")
    relabel = {old: new for new, old in enumerate(keep)}
    attach = attach_out is not None
    if not removed and not attach:
        rep = RebalanceReport(
            entropy=matching_entropy(x), target=matching_entropy(x),
            slack=0.0, meets_target=True, passes=0,
        )
        return RebalanceResult(matching=x, vertex_map=relabel,
                               new_vertex=None, report=rep)
    n_new = len(keep) + (1 if attach else 0)
    arcs = [
        (relabel[u], relabel[v])
        for (u, v) in g.edges
        if u in relabel and v in relabel
    ]
    u_id = None
    w = np.zeros((n_new, n_new))
    for u, v in g.edges:
        if u in relabel and v in relabel:
            w[relabel[u], relabel[v]] = x.weights[u, v]
    if attach:
        outs = sorted({relabel[v] for v in attach_out})
        ins = sorted({relabel[v] for v in attach_in})
        if len(outs) != len(set(attach_out)) or len(ins) != len(set(attach_in)):
            raise InputError("attachment neighborhoods must survive the removal")
        if not outs or not ins:
            raise InputError("attachment neighborhoods must be nonempty")
        u_id = n_new - 1
        for v in outs:
            arcs.append((u_id, v))
            w[u_id, v] = 1.0 / len(outs)
        for v in ins:
            arcs.append((v, u_id))
            w[v, u_id] = 1.0 / len(ins)
    host = Digraph(n_new, arcs)
    for v in range(n_new):
        if host.deg_out(v) == 0 or host.deg_in(v) == 0:
            raise ProcedureError(
                "semidegree collapse: a vertex lost all out- or in-neighbors",
                vertex=v,
            )
    total = float(w.sum())
    if total <= 0:
        raise ProcedureError("no surviving weight to rescale", total=total)
    w *= n_new / total
    mask = _support_mask(host)
    p1 = _redistribute_rows(w, mask, tol, max_passes)
    p2 = _redistribute_rows(w.T, mask.T, tol, max_passes)
    out = PFM(host, w, tol=2 * tol)
    h_new = matching_entropy(out)
    kept = len(keep)
    target = (kept / g.n) * matching_entropy(x) - kept * math.log2(g.n / kept)
    rep = RebalanceReport(
        entropy=h_new, target=target, slack=h_new - target,
        meets_target=h_new >= target - 1e-9, passes=p1 + p2,
    )
    return RebalanceResult(matching=out, vertex_map=relabel,
                           new_vertex=u_id, report=rep)


@dataclass(frozen=True)
class MinusSetReport:
    host_entropy: float
    entropy: float
    loss: float
    normalization: NormalizationReport


def matching_minus_set(
    g: Digraph, a_set: Iterable[int], b: float
) -> tuple[PFM, MinusSetReport]:
    """b-normal matching on G - A whose entropy stays close to h(G)."""
    a_set = set(a_set)
    n = g.n
    if n >= 3 and len(a_set) > n / math.log(n) ** 2:
        warnings.warn(
            f"removed set of size {len(a_set)} is large for n={n}; "
            "the entropy-loss accounting may be loose",
            stacklevel=2,
        )
    x, _ = max_entropy_matching(g)
    h_g = matching_entropy(x)
    res = rebalance_after_removal(x, a_set)
    y = res.matching
    partner, _ = max_entropy_matching(y.host)
    c_actual = normality(partner).b_min
    if c_actual >= b:
        raise ProcedureError(
            "target b below the host's own normality",
            partner_normality=c_actual, target_b=b,
        )
    lam = min(0.9, max(0.1, 1.2 * c_actual / b))
    cfg = NormalizationConfig(b=b, lam=lam, c=None)
    z, norm_rep = normalize_to_b(y, cfg, partner=partner)
    h_z = matching_entropy(z)
    rep = MinusSetReport(
        host_entropy=h_g, entropy=h_z, loss=h_g - h_z, normalization=norm_rep
    )
    return z, rep


# ---------------------------------------------------------------------------
# text format: "pfm <n> <m>" then "<u> <v> <weight>" per host arc
# ---------------------------------------------------------------------------

def write_pfm_text(x: PFM) -> str:
    lines = [f"pfm {x.n} {x.host.m}"]
    for u, v in x.support_arcs():
        lines.append(f"{u} {v} {x.weights[u, v]:.17g}")
    return "\n".join(lines) + "\n"


def parse_pfm_text(text: str) -> PFM:
    lines = text.splitlines()
    if not lines:
        raise ParseError(1, "empty input")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "pfm":
        raise ParseError(1, "expected header 'pfm <n> <m>'")
    try:
        n, m = int(head[1]), int(head[2])
    except ValueError:
        raise ParseError(1, "non-integer vertex/arc count") from None
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != m:
        raise ParseError(len(lines), f"expected {m} arc lines, found {len(body)}")
    w = np.zeros((n, n))
    arcs = []
    seen = set()
    for idx, ln in enumerate(body, start=2):
        parts = ln.split()
        if len(parts) != 3:
            raise ParseError(idx, "expected '<u> <v> <weight>'")
        try:
            u, v = int(parts[0]), int(parts[1])
            wt = float(parts[2])
        except ValueError:
            raise ParseError(idx, "malformed arc line") from None
        if not (0 <= u < n and 0 <= v < n) or u == v:
            raise ParseError(idx, "bad arc endpoints")
        if (u, v) in seen:
            raise ParseError(idx, f"duplicate arc {u} {v}")
        if wt < 0:
            raise ParseError(idx, "negative weight")
        seen.add((u, v))
        arcs.append((u, v))
        w[u, v] = wt
    try:
        return PFM(Digraph(n, arcs), w)
    except InputError as exc:
        raise ParseError(len(lines), str(exc)) from None
