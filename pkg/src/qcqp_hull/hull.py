"""The relaxed epigraph: SOC description, membership, and the constructive
decomposition of its points into convex combinations of true epigraph points.

With the multiplier set written as conv(vertices) + cone(rays), the
relaxed epigraph is exactly

    { (x, t) : q(gamma_e, x) <= 2t  for every vertex gamma_e,
               sum_i (gamma_r)_i q_i(x) <= 0  for every extreme ray gamma_r }

a finite list of convex quadratic (SOC-representable) constraints.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    EpigraphPoint,
    Qcqp,
    QuadraticFn,
    check_feasible,
    constraint_values,
    eval_quadratic,
    lagrangian,
)
from .errors import NoDescentDirection, NotInDsdp, QcqpHullError
from .gamma import FACE_TOL, GammaData, classify_face, optimal_face
from .linalg import Definiteness, psd_status, solve_homogeneous

MEMBERSHIP_TOL = 1e-8
WEIGHT_SUM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SocDescription:
    """Finite convex-quadratic description of the relaxed epigraph.

    ``epigraph[k](x) <= 2t`` for each multiplier-set vertex and
    ``homogeneous[k](x) <= 0`` for each extreme ray.  Ray constraints that
    reduce to a nonpositive constant are dropped as identically true.
    """

    epigraph: tuple
    homogeneous: tuple

    @property
    def dim(self) -> int:
        return self.epigraph[0].dim if self.epigraph else self.homogeneous[0].dim


@dataclass(frozen=True, eq=False)
class ConvexCombination:
    """Certificate: target = sum_j weights[j] * points[j], every point in
    the true epigraph.  ``trace`` records each recursion split."""

    points: tuple
    weights: np.ndarray
    trace: tuple


def soc_description(v, p: Qcqp, psd_tol: float = 1e-8, drop_tol: float = 1e-12) -> SocDescription:
    """Build the hull description from the minimal generator representation."""
    if v.is_empty:
        raise ValueError("multiplier set is empty; the relaxation is unbounded everywhere")
    epi = []
    for gamma_e in v.vertices:
        g = lagrangian(p, gamma_e)
        _require_psd_hessian(g, psd_tol, "epigraph")
        epi.append(g)
    hom = []
    for gamma_r in v.rays:
        A = sum(gi * q.A for gi, q in zip(gamma_r, p.constraints))
        b = sum(gi * q.b for gi, q in zip(gamma_r, p.constraints))
        c = sum(gi * q.c for gi, q in zip(gamma_r, p.constraints))
        h = QuadraticFn(A, b, float(c))
        if (
            np.max(np.abs(h.A)) <= drop_tol
            and np.max(np.abs(h.b)) <= drop_tol
            and h.c <= drop_tol
        ):
            continue
        _require_psd_hessian(h, psd_tol, "homogeneous")
        hom.append(h)
    return SocDescription(epigraph=tuple(epi), homogeneous=tuple(hom))


def _require_psd_hessian(q: QuadraticFn, tol: float, label: str) -> None:
    status = psd_status(q.A, tol=tol)
    if status.tag is Definiteness.INDEFINITE:
        raise QcqpHullError(f"{label} hull constraint has an indefinite Hessian")


def dsdp_membership(d: SocDescription, pt: EpigraphPoint, tol: float = MEMBERSHIP_TOL):
    """(inside, worst violation) of a point against the hull description.

    The worst violation is the largest constraint residual; it is
    negative strictly inside and ~0 on the boundary.
    """
    residuals = [eval_quadratic(g, pt.x) - 2.0 * pt.t for g in d.epigraph]
    residuals += [eval_quadratic(h, pt.x) for h in d.homogeneous]
    if not residuals:
        return True, float("-inf")
    worst = float(np.max(residuals))
    return worst <= tol, worst


def verify_certificate(
    p: Qcqp, c: ConvexCombination, target: EpigraphPoint, tol: float = MEMBERSHIP_TOL
) -> bool:
    """Independent re-check of a certificate: positive weights summing to
    one, exact reconstruction of the target, and every point feasible for
    the original problem.  Uses no decomposition state."""
    w = np.asarray(c.weights, dtype=float)
    if w.size == 0 or np.any(w <= 0.0):
        return False
    if abs(float(np.sum(w)) - 1.0) > WEIGHT_SUM_TOL:
        return False
    if len(c.points) != w.size:
        return False
    xs = np.array([pt.x for pt in c.points])
    ts = np.array([pt.t for pt in c.points])
    recon_x = w @ xs
    recon_t = float(w @ ts)
    if np.max(np.abs(recon_x - target.x)) > tol:
        return False
    if abs(recon_t - target.t) > tol:
        return False
    return all(check_feasible(p, pt, tol).feasible for pt in c.points)


# ---------------------------------------------------------------------------
# Decomposition (recursive splitting along shared-nullspace directions)


def decompose(
    p: Qcqp,
    gd: GammaData,
    pt: EpigraphPoint,
    tol: float = MEMBERSHIP_TOL,
    soc: SocDescription | None = None,
) -> ConvexCombination:
    """Write a relaxed-epigraph point as a convex combination of true
    epigraph points.

    The point is first dropped onto the supremum surface (the surplus in t
    is re-added uniformly at the end).  At a definite optimal face the
    point itself is feasible; at a semidefinite face a direction v in the
    shared zero eigenspace with <b(gamma), v> constant on the face keeps
    all face functionals flat, and stepping to the nearest roots of the
    remaining convex quadratics splits the point into two with strictly
    larger optimal faces.
    """
    if soc is None:
        soc = soc_description(gd.v, p)
    inside, worst = dsdp_membership(soc, pt, tol)
    if not inside:
        raise NotInDsdp(f"point violates the hull description by {worst:.3e}")

    res = optimal_face(gd.v, p, pt.x, gd.h)
    if res is None:
        raise NotInDsdp("supremum over the multiplier set is unbounded at this x")
    sup, _ = res
    surplus = max(0.0, pt.t - sup / 2.0)

    m = p.num_constraints
    Bmat = np.column_stack([q.b for q in p.constraints])
    b0 = p.objective.b
    trace: list = []
    xs, ws = _split(p, gd, np.asarray(pt.x, dtype=float), 0, m, Bmat, b0, tol, trace)
    points = tuple(EpigraphPoint(x=x, t=t + surplus) for x, t in xs)
    return ConvexCombination(points=points, weights=np.array(ws), trace=tuple(trace))


def _split(p, gd, x, depth, m, Bmat, b0, tol, trace):
    """Returns ([(x_j, t_j)], [w_j]) decomposing (x, sup(x)/2)."""
    res = optimal_face(gd.v, p, x, gd.h)
    if res is None:
        raise NotInDsdp("supremum became unbounded during decomposition")
    sup, face = res
    t0 = sup / 2.0
    cls = classify_face(face, p, gd.sd, gd.h)
    if cls.definite:
        return [(x, t0)], [1.0]
    if depth > m:
        raise NoDescentDirection(
            f"recursion exceeded the face-dimension bound (depth {depth}, m {m})"
        )

    v, s = _flat_direction(face, cls, Bmat, b0)
    if v is None:
        raise NoDescentDirection(
            "the direction system on the optimal face has only the zero solution "
            f"(active rows {face.active_rows}, dim V = {cls.dim_v}, "
            f"b-affine-dim = {cls.b_aff_dim})"
        )

    alpha_plus, alpha_minus = _step_lengths(p, gd, x, t0, v, s, tol)
    lam = -alpha_minus / (alpha_plus - alpha_minus)
    trace.append(
        {
            "depth": depth,
            "active_rows": [int(i) for i in face.active_rows],
            "aff_dim": int(face.aff_dim),
            "dim_v": int(cls.dim_v),
            "b_aff_dim": int(cls.b_aff_dim),
            "v": [float(t) for t in v],
            "s": float(s),
            "alpha_plus": float(alpha_plus),
            "alpha_minus": float(alpha_minus),
            "child_aff_dims": [],
        }
    )
    rec = trace[-1]
    out_pts, out_ws = [], []
    for alpha, w in ((alpha_plus, lam), (alpha_minus, 1.0 - lam)):
        child_x = x + alpha * v
        child_res = optimal_face(gd.v, p, child_x, gd.h)
        rec["child_aff_dims"].append(int(child_res[1].aff_dim) if child_res else -1)
        pts, ws = _split(p, gd, child_x, depth + 1, m, Bmat, b0, tol, trace)
        out_pts.extend(pts)
        out_ws.extend(w * wi for wi in ws)
    return out_pts, out_ws


def _flat_direction(face, cls, Bmat, b0):
    """Unit direction v in the shared zero eigenspace and scalar s with
    <b(gamma), v> = s across the face; None when only v = 0 works."""
    V = cls.basis
    d = V.shape[1]
    samples = [g for g in face.vertices]
    base = face.relint_point()
    samples += [base + r for r in face.rays]
    rows = []
    for gamma in samples:
        bg = b0 + Bmat @ gamma
        rows.append(np.concatenate([V.T @ bg, [-1.0]]))
    sol = solve_homogeneous(np.array(rows))
    if sol is None:
        return None, None
    u, s = sol[:d], float(sol[d])
    v = V @ u
    nv = float(np.linalg.norm(v))
    if nv <= 1e-12:
        return None, None
    v /= nv
    s /= nv
    for vi in v:
        if abs(vi) > 1e-10:
            if vi < 0:
                v, s = -v, -s
            break
    return v, s


def _step_lengths(p, gd, x, t0, v, s, tol):
    """Nearest positive and negative roots over the non-flat convex
    quadratics alpha -> q(gamma_e, x + alpha v) - 2(t0 + alpha s) and
    alpha -> sum (gamma_r)_i q_i(x + alpha v)."""
    rvals = constraint_values(p, x)
    q0x = eval_quadratic(p.objective, x)
    Av_list = [q.A @ v for q in p.quadratics()]
    vAv = np.array([v @ av for av in Av_list])
    xAv = np.array([x @ av for av in Av_list])
    bv = np.array([q.b @ v for q in p.quadratics()])

    coeffs = []
    for gamma in gd.v.vertices:
        ge = np.concatenate([[1.0], gamma])
        a = float(ge @ vAv)
        b = 2.0 * float(ge @ (xAv + bv)) - 2.0 * s
        c = q0x + float(gamma @ rvals) - 2.0 * t0
        coeffs.append((a, b, c))
    for gamma in gd.v.rays:
        gr = np.concatenate([[0.0], gamma])
        a = float(gr @ vAv)
        b = 2.0 * float(gr @ (xAv + bv))
        c = float(gamma @ rvals)
        coeffs.append((a, b, c))

    scale = max(1.0, max(abs(c) for co in coeffs for c in co))
    zero_tol = tol * scale
    pos_roots, neg_roots = [], []
    for a, b, c in coeffs:
        if abs(a) <= zero_tol and abs(b) <= zero_tol and abs(c) <= zero_tol:
            continue  # flat on the face
        c = min(c, 0.0)  # inside the hull: negative up to roundoff
        if a > zero_tol:
            disc = b * b - 4.0 * a * c
            root = np.sqrt(max(disc, 0.0))
            pos_roots.append((-b + root) / (2.0 * a))
            neg_roots.append((-b - root) / (2.0 * a))
        elif abs(b) > zero_tol:
            r = -c / b
            (pos_roots if b > 0 else neg_roots).append(r)
        # constant negative: no root
    if not pos_roots or not neg_roots:
        raise NoDescentDirection(
            "no strictly convex functional bounds the step; the supremum "
            "direction is unbounded"
        )
    alpha_plus = max(min(pos_roots), 0.0)
    alpha_minus = min(max(neg_roots), 0.0)
    if alpha_plus - alpha_minus <= zero_tol:
        raise NoDescentDirection("degenerate step interval during decomposition")
    return alpha_plus, alpha_minus
