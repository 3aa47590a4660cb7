"""The dual multiplier polyhedron: H/V representations, faces, classification.

After whitening + joint diagonalization the multiplier set is the
polyhedron { gamma : d_j(A_0) + sum_i gamma_i d_j(A_i) >= 0 for all
coordinates j, gamma_i >= 0 for inequality indices }.  This module builds
that H-representation, converts it to vertices + extreme rays with an
incremental double description method, optimizes linear functionals over
it by generator scan, and enumerates/classifies its faces.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .core import Qcqp, constraint_values, eval_quadratic
from .errors import GuardExceeded, NoInteriorPoint
from .linalg import (
    Definiteness,
    SimultaneousDiagonalization,
    psd_status,
    sym_eig,
    whiten_simdiag,
)

DD_GUARD = 12
FACE_GUARD = 20
DD_TOL = 1e-9
FACE_TOL = 1e-8
RANK_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class HRow:
    """One inequality a . gamma + beta >= 0 with its origin.

    kind is "eigenvalue" (index = diagonal coordinate j) or "sign"
    (index = inequality constraint i).
    """

    a: np.ndarray
    beta: float
    kind: str
    index: int


@dataclass(frozen=True, eq=False)
class PolyhedronH:
    rows: tuple
    dim: int


@dataclass(frozen=True, eq=False)
class PolyhedronV:
    """Minimal generator representation: conv(vertices) + cone(rays).

    Rays are unit length.  Lineality directions appear as opposite ray
    pairs.  Empty vertices means the polyhedron is empty.
    """

    vertices: np.ndarray
    rays: np.ndarray

    @property
    def is_empty(self) -> bool:
        return self.vertices.shape[0] == 0


@dataclass(frozen=True, eq=False)
class Face:
    """A face described by the generators of the ambient polyhedron it contains."""

    vertex_ids: tuple
    ray_ids: tuple
    vertices: np.ndarray
    rays: np.ndarray
    active_rows: tuple
    aff_dim: int

    def relint_point(self) -> np.ndarray:
        pt = self.vertices.mean(axis=0)
        if self.rays.shape[0]:
            pt = pt + self.rays.sum(axis=0)
        return pt


@dataclass(frozen=True, eq=False)
class FaceClass:
    """Definite (witness with positive definite aggregated Hessian) or
    semidefinite (orthonormal basis of the shared zero eigenspace)."""

    definite: bool
    witness: np.ndarray | None = None
    basis: np.ndarray | None = None
    b_aff_dim: int | None = None
    dead_coords: tuple = ()

    @property
    def dim_v(self) -> int:
        return 0 if self.basis is None else self.basis.shape[1]


@dataclass(frozen=True, eq=False)
class GammaData:
    """Pipeline bundle: diagonalization, H- and V-representations, witness."""

    problem: Qcqp
    sd: SimultaneousDiagonalization
    h: PolyhedronH
    v: PolyhedronV
    gamma_star: np.ndarray
    margin: float


def _rank(M, tol: float = RANK_TOL) -> int:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


def _aff_dim(vertices: np.ndarray, rays: np.ndarray) -> int:
    if vertices.shape[0] == 0:
        return -1
    dirs = [vertices[1:] - vertices[0]] if vertices.shape[0] > 1 else []
    if rays.shape[0]:
        dirs.append(rays)
    if not dirs:
        return 0
    return _rank(np.vstack(dirs))


def _normalized_rows(h: PolyhedronH):
    """Rows scaled to ||a|| = 1 where a != 0 (constant rows untouched)."""
    A = np.array([r.a for r in h.rows], dtype=float).reshape(len(h.rows), h.dim)
    beta = np.array([r.beta for r in h.rows], dtype=float)
    norms = np.linalg.norm(A, axis=1)
    scale = np.where(norms > 1e-300, norms, 1.0)
    return A / scale[:, None], beta / scale, norms > 1e-12


def _active_matrix(h: PolyhedronH, v: PolyhedronV, tol: float):
    """Boolean activity of every generator on every (normalized) row.

    Constant rows (a = 0) are never active.
    """
    A, beta, nontrivial = _normalized_rows(h)
    if v.vertices.shape[0]:
        vact = np.abs(v.vertices @ A.T + beta) <= tol
        vact &= nontrivial
    else:
        vact = np.zeros((0, len(h.rows)), dtype=bool)
    if v.rays.shape[0]:
        ract = np.abs(v.rays @ A.T) <= tol
        ract &= nontrivial
    else:
        ract = np.zeros((0, len(h.rows)), dtype=bool)
    return vact, ract


def build_gamma(p: Qcqp, sd: SimultaneousDiagonalization) -> PolyhedronH:
    """H-representation of the multiplier set in the diagonalizing basis."""
    m = p.num_constraints
    rows = []
    for j in range(p.dim):
        a = sd.diagonals[1:, j].copy()
        rows.append(HRow(a=a, beta=float(sd.diagonals[0, j]), kind="eigenvalue", index=j))
    for i in range(p.num_inequalities):
        e = np.zeros(m)
        e[i] = 1.0
        rows.append(HRow(a=e, beta=0.0, kind="sign", index=i))
    return PolyhedronH(rows=tuple(rows), dim=m)


# ---------------------------------------------------------------------------
# Double description


def _dedup_rows(A: np.ndarray, beta: np.ndarray):
    seen = {}
    order = []
    for i in range(A.shape[0]):
        key = tuple(np.round(np.concatenate([A[i], [beta[i]]]), 10))
        if key not in seen:
            seen[key] = i
            order.append(i)
    return np.array(order, dtype=int)


def _initial_basis_rows(B: np.ndarray, dim: int):
    """Greedy selection of ``dim`` linearly independent rows of B."""
    chosen = []
    for i in range(B.shape[0]):
        cand = chosen + [i]
        if _rank(B[cand], tol=1e-10) == len(cand):
            chosen.append(i)
            if len(chosen) == dim:
                return chosen
    return None


def _dd_cone(B: np.ndarray, tol: float) -> np.ndarray:
    """Extreme rays of the pointed cone {x : Bx >= 0} (B full column rank)."""
    dim = B.shape[1]
    first = _initial_basis_rows(B, dim)
    if first is None:
        raise AssertionError("cone is not pointed: rows do not span")
    rest = [i for i in range(B.shape[0]) if i not in first]
    rays = np.linalg.inv(B[first]).T  # row k: ray with B[first] @ ray = e_k
    rays /= np.linalg.norm(rays, axis=1)[:, None]
    processed = list(first)
    act = np.abs(rays @ B[processed].T) <= tol

    for ri in rest:
        b = B[ri]
        vals = rays @ b
        pos = np.where(vals > tol)[0]
        neg = np.where(vals < -tol)[0]
        zero = np.where(np.abs(vals) <= tol)[0]
        if neg.size == 0:
            processed.append(ri)
            act = np.hstack([act, (np.abs(vals) <= tol)[:, None]])
            continue
        keep = np.concatenate([pos, zero])
        new_rays = []
        min_common = max(dim - 2, 0)
        for i, j in itertools.product(pos, neg):
            common = act[i] & act[j]
            if np.count_nonzero(common) < min_common:
                continue
            adjacent = True
            for k in range(rays.shape[0]):
                if k == i or k == j:
                    continue
                if np.all(act[k][common]):
                    adjacent = False
                    break
            if adjacent:
                r = vals[i] * rays[j] - vals[j] * rays[i]
                nrm = np.linalg.norm(r)
                if nrm > tol:
                    new_rays.append(r / nrm)
        processed.append(ri)
        parts = [rays[keep]]
        if new_rays:
            parts.append(np.array(new_rays))
        rays = np.vstack(parts) if parts else np.zeros((0, dim))
        if rays.shape[0] == 0:
            return rays
        act = np.abs(rays @ B[processed].T) <= tol
    return rays


def _canonical_order(points: np.ndarray) -> np.ndarray:
    if points.shape[0] <= 1:
        return points
    keys = [tuple(np.round(p, 10)) for p in points]
    order = sorted(range(len(keys)), key=lambda i: keys[i])
    return points[order]


def _dedup_points(points: np.ndarray, tol: float) -> np.ndarray:
    out = []
    for p in points:
        if not any(np.max(np.abs(p - q)) <= tol for q in out):
            out.append(p)
    return np.array(out) if out else np.zeros((0, points.shape[1]))


def dd_vrep(h: PolyhedronH, guard: int = DD_GUARD, tol: float = DD_TOL) -> PolyhedronV:
    """Minimal vertex/ray representation by the incremental double
    description method on the homogenization cone.

    Lineality is split off first (quotient by the kernel of the row
    directions) and returned as opposite ray pairs.  An empty result
    signals an empty polyhedron.
    """
    m = h.dim
    if m > guard:
        raise GuardExceeded(f"double description guard: dimension {m} > {guard}")
    empty = PolyhedronV(vertices=np.zeros((0, m)), rays=np.zeros((0, m)))

    A = np.array([r.a for r in h.rows], dtype=float).reshape(len(h.rows), m)
    beta = np.array([r.beta for r in h.rows], dtype=float)
    norms = np.linalg.norm(A, axis=1)
    trivial = norms <= 1e-12
    if np.any(beta[trivial] < -tol):
        return empty
    A, beta = A[~trivial], beta[~trivial]
    if A.shape[0]:
        scale = np.linalg.norm(A, axis=1)
        A /= scale[:, None]
        beta /= scale
        keep = _dedup_rows(A, beta)
        A, beta = A[keep], beta[keep]

    # Lineality = kernel of the row directions.
    if A.shape[0] == 0:
        lin = np.eye(m)
        d = 0
        Qperp = np.zeros((m, 0))
    else:
        U, s, Vt = np.linalg.svd(A, full_matrices=True)
        r = int(np.sum(s > RANK_TOL * max(1.0, s[0] if s.size else 1.0)))
        Qperp = Vt[:r].T
        lin = Vt[r:].T
        d = r

    if d == 0:
        # Whole quotient collapses: polyhedron = point + lineality.
        vertices = np.zeros((1, m))
        rays = np.vstack([lin.T, -lin.T]) if lin.shape[1] else np.zeros((0, m))
        return PolyhedronV(vertices=vertices, rays=_canonical_order(rays))

    Aq = A @ Qperp  # rows in quotient coordinates
    B = np.hstack([Aq, beta[:, None]])
    B = np.vstack([B, np.concatenate([np.zeros(d), [1.0]])])  # w >= 0
    B /= np.linalg.norm(B, axis=1)[:, None]

    cone_rays = _dd_cone(B, tol)
    if cone_rays.shape[0] == 0:
        return empty
    w = cone_rays[:, d]
    vert_mask = w > tol
    if not np.any(vert_mask):
        return empty
    vertices_q = cone_rays[vert_mask, :d] / w[vert_mask, None]
    rays_q = cone_rays[~vert_mask, :d]

    vertices = vertices_q @ Qperp.T
    ray_list = [rays_q @ Qperp.T] if rays_q.shape[0] else []
    if lin.shape[1]:
        ray_list.extend([lin.T, -lin.T])
    rays = np.vstack(ray_list) if ray_list else np.zeros((0, m))
    if rays.shape[0]:
        rays /= np.linalg.norm(rays, axis=1)[:, None]
        rays = _dedup_points(rays, 1e-9)
    vertices = _dedup_points(vertices, 1e-9)
    return PolyhedronV(vertices=_canonical_order(vertices), rays=_canonical_order(rays))


# ---------------------------------------------------------------------------
# Optimization and faces


def _face_from_generators(
    h: PolyhedronH, v: PolyhedronV, vertex_ids, ray_ids, tol: float = FACE_TOL
) -> Face:
    vertex_ids = tuple(sorted(int(i) for i in vertex_ids))
    ray_ids = tuple(sorted(int(i) for i in ray_ids))
    verts = v.vertices[list(vertex_ids)] if vertex_ids else np.zeros((0, h.dim))
    rays = v.rays[list(ray_ids)] if ray_ids else np.zeros((0, h.dim))
    vact, ract = _active_matrix(h, PolyhedronV(vertices=verts, rays=rays), tol)
    stacked = np.vstack([vact, ract]) if vact.size + ract.size else np.zeros((0, len(h.rows)), dtype=bool)
    active = np.where(np.all(stacked, axis=0))[0] if stacked.shape[0] else np.array([], dtype=int)
    return Face(
        vertex_ids=vertex_ids,
        ray_ids=ray_ids,
        vertices=verts,
        rays=rays,
        active_rows=tuple(int(i) for i in active),
        aff_dim=_aff_dim(verts, rays),
    )


def optimal_face(
    v: PolyhedronV, p: Qcqp, x, h: PolyhedronH | None = None, tol: float = FACE_TOL
):
    """Maximize gamma -> q_0(x) + sum gamma_i q_i(x) over the polyhedron.

    Returns (sup_value, face of maximizers) or None when a ray makes the
    functional unbounded above.
    """
    if v.is_empty:
        raise ValueError("polyhedron is empty")
    x = np.asarray(x, dtype=float).reshape(-1)
    rvals = constraint_values(p, x)
    q0 = eval_quadratic(p.objective, x)
    vertex_vals = q0 + v.vertices @ rvals
    sup = float(np.max(vertex_vals))
    tol_abs = tol * max(1.0, abs(sup))
    if v.rays.shape[0]:
        ray_vals = v.rays @ rvals
        if np.any(ray_vals > tol_abs):
            return None
        ray_ids = np.where(np.abs(ray_vals) <= tol_abs)[0]
    else:
        ray_ids = np.array([], dtype=int)
    vertex_ids = np.where(vertex_vals >= sup - tol_abs)[0]
    if h is None:
        h = PolyhedronH(rows=(), dim=v.vertices.shape[1])
    face = _face_from_generators(h, v, vertex_ids, ray_ids, tol)
    return sup, face


def classify_face(
    face: Face, p: Qcqp, sd: SimultaneousDiagonalization, h: PolyhedronH, tol: float = FACE_TOL
) -> FaceClass:
    """Definite/semidefinite dichotomy in the diagonalizing basis.

    Coordinate j is dead on the face when its eigenvalue row is active at
    every generator; the shared zero eigenspace is spanned by the dead
    columns of the congruence basis, orthonormalized.
    """
    if face.vertices.shape[0] == 0:
        raise ValueError("face has no generators")
    active = set(face.active_rows)
    dead = sorted(
        {h.rows[i].index for i in active if h.rows[i].kind == "eigenvalue"}
    )
    if not dead:
        witness = face.relint_point()
        return FaceClass(definite=True, witness=witness)
    cols = sd.basis[:, dead]
    Q, _ = np.linalg.qr(cols)
    Bmat = (
        np.column_stack([q.b for q in p.constraints])
        if p.num_constraints
        else np.zeros((p.dim, 0))
    )
    dirs = []
    if face.vertices.shape[0] > 1:
        dirs.append(face.vertices[1:] - face.vertices[0])
    if face.rays.shape[0]:
        dirs.append(face.rays)
    b_aff = _rank(np.vstack(dirs) @ Bmat.T) if dirs else 0
    return FaceClass(
        definite=False, basis=Q, b_aff_dim=b_aff, dead_coords=tuple(dead)
    )


def enumerate_faces(
    h: PolyhedronH, v: PolyhedronV, guard: int = FACE_GUARD, tol: float = FACE_TOL
):
    """All nonempty faces, each once, closed under intersection of facets.

    Includes the polyhedron itself.  Faces are identified by the ambient
    generators they contain; a candidate without a vertex is empty.
    """
    if v.is_empty:
        return []
    A, beta, nontrivial = _normalized_rows(h)
    keep = np.where(nontrivial)[0]
    dedup = keep[_dedup_rows(A[keep], beta[keep])] if keep.size else np.array([], dtype=int)
    if dedup.size > guard:
        raise GuardExceeded(f"face enumeration guard: {dedup.size} rows > {guard}")

    vact, ract = _active_matrix(h, v, tol)
    nv, nr = v.vertices.shape[0], v.rays.shape[0]
    full = (frozenset(range(nv)), frozenset(range(nr)))
    seen = {full}
    queue = [full]
    for ri in dedup:
        vs = frozenset(np.where(vact[:, ri])[0])
        rs = frozenset(np.where(ract[:, ri])[0])
        key = (vs, rs)
        if vs and key not in seen:
            seen.add(key)
            queue.append(key)
    # Close under pairwise intersection.
    frontier = list(seen)
    while frontier:
        fresh = []
        for k1 in frontier:
            for k2 in list(seen):
                key = (k1[0] & k2[0], k1[1] & k2[1])
                if key[0] and key not in seen:
                    seen.add(key)
                    fresh.append(key)
        frontier = fresh
    faces = [
        _face_from_generators(h, v, sorted(vs), sorted(rs), tol) for vs, rs in seen
    ]
    faces.sort(key=lambda f: (f.aff_dim, f.vertex_ids, f.ray_ids))
    return faces


# ---------------------------------------------------------------------------
# Interior multiplier search


def find_gamma_star(
    h: PolyhedronH, margin_cap: float = 1.0, tol: float = 1e-9, guard: int = DD_GUARD + 1
):
    """Maximize the minimum eigenvalue row over the polyhedron.

    Lifts to (gamma, mu) with every eigenvalue row >= mu and mu <= cap,
    enumerates the lifted polyhedron's generators, and picks the vertex
    with the largest mu.  Returns (gamma_star, margin) or None when no
    strictly interior multiplier exists.
    """
    m = h.dim
    rows = []
    for r in h.rows:
        if r.kind == "eigenvalue":
            rows.append(HRow(a=np.concatenate([r.a, [-1.0]]), beta=r.beta, kind=r.kind, index=r.index))
        else:
            rows.append(HRow(a=np.concatenate([r.a, [0.0]]), beta=r.beta, kind=r.kind, index=r.index))
    cap = np.zeros(m + 1)
    cap[m] = -1.0
    rows.append(HRow(a=cap, beta=float(margin_cap), kind="cap", index=0))
    lifted = PolyhedronH(rows=tuple(rows), dim=m + 1)
    lv = dd_vrep(lifted, guard=guard)
    if lv.is_empty:
        return None
    mus = lv.vertices[:, m]
    best = float(np.max(mus))
    if best <= tol:
        return None
    cands = lv.vertices[mus >= best - 1e-12]
    cands = _canonical_order(cands)
    gamma = cands[0, :m].copy()
    return gamma, best


def find_definite_multiplier(
    p: Qcqp, tol: float = 1e-9, max_iter: int = 300, bound: float = 1e4
):
    """A multiplier gamma (signs respected) with A(gamma) positive definite.

    Tries gamma = 0, then maximizes the smallest eigenvalue of A(gamma) by
    a cutting-plane scheme on mu <= v' A(gamma) v.  Returns None when the
    maximum is not positive (no definite aggregation exists in the box).
    """
    m = p.num_constraints
    A0 = p.objective.A
    As = [q.A for q in p.constraints]
    scale = max(1.0, max(float(np.max(np.abs(M))) for M in [A0, *As]))

    def min_eig(gamma):
        M = A0 + sum(g * Ai for g, Ai in zip(gamma, As))
        spec = sym_eig(M)
        return spec.eigenvalues[0], spec.eigenvectors[:, 0]

    lam0, v0 = min_eig(np.zeros(m))
    if lam0 > 1e-8 * scale:
        return np.zeros(m)

    bounds = [(0.0, bound) if i < p.num_inequalities else (-bound, bound) for i in range(m)]
    bounds.append((-bound, bound))  # mu
    cuts_a, cuts_b = [], []
    best_gamma, best_lam = np.zeros(m), lam0

    def add_cut(v):
        # mu - sum_i gamma_i (v'A_i v) <= v'A_0 v
        row = np.zeros(m + 1)
        for i, Ai in enumerate(As):
            row[i] = -float(v @ Ai @ v)
        row[m] = 1.0
        cuts_a.append(row)
        cuts_b.append(float(v @ A0 @ v))

    add_cut(v0)
    c = np.zeros(m + 1)
    c[m] = -1.0
    for _ in range(max_iter):
        res = linprog(c, A_ub=np.array(cuts_a), b_ub=np.array(cuts_b), bounds=bounds, method="highs")
        if not res.success:
            break
        gamma_k = res.x[:m]
        mu_k = res.x[m]
        lam, v = min_eig(gamma_k)
        if lam > best_lam:
            best_lam, best_gamma = lam, gamma_k.copy()
        if mu_k - best_lam <= max(tol, 1e-9 * scale):
            break
        add_cut(v)
    if best_lam > tol * scale:
        return best_gamma
    return None


def build_gamma_data(p: Qcqp, dd_guard: int = DD_GUARD) -> GammaData:
    """Whiten, certify simultaneous diagonalizability, and build both
    multiplier-set representations plus an interior witness.

    Raises NoInteriorPoint when no definite aggregation exists and
    NotSimultaneouslyDiagonalizable when polyhedrality is not certified.
    """
    gamma0 = find_definite_multiplier(p)
    if gamma0 is None:
        raise NoInteriorPoint("no multiplier gives a positive definite aggregated Hessian")
    sd = whiten_simdiag(p, gamma0)
    h = build_gamma(p, sd)
    v = dd_vrep(h, guard=dd_guard)
    found = find_gamma_star(h, guard=dd_guard + 1)
    if found is None:
        raise NoInteriorPoint("multiplier set has no interior point in the diagonal basis")
    gamma_star, margin = found
    status = psd_status(p.objective.A + sum(g * q.A for g, q in zip(gamma_star, p.constraints)))
    if status.tag is not Definiteness.POSITIVE_DEFINITE:
        raise NoInteriorPoint("interior witness failed the definiteness re-check")
    return GammaData(problem=p, sd=sd, h=h, v=v, gamma_star=gamma_star, margin=margin)
