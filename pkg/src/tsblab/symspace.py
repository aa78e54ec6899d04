"""Symmetric pairs, restricted root systems and Weyl chamber geometry.

Spaces are handled entirely at the Lie-algebra level: a catalog involution
splits g = k + m, a Cartan subspace a of m is found by centralizing a
generic element, and the restricted roots are read off the spectrum of
-ad_w^2 on m.  Each positive root carries paired orthonormal bases
(xi_lambda^s in m_lambda, zeta_lambda^s in k_lambda) normalized so that
[u, xi] = -lambda_R(u) zeta and [u, zeta] = lambda_R(u) xi for u in a.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .algebra import AlgebraBasis, AlgebraError, build_algebra, orthonormalize

PAIRING_TOL = 1e-8

CATALOG = ("sphere", "rp", "cp", "hp", "su_so")


class DecompositionError(RuntimeError):
    """Certification failure in the Cartan / root-space construction."""


@dataclass(frozen=True)
class SymmetricPair:
    space_id: str
    n: int
    algebra: AlgebraBasis
    involution: np.ndarray  # (d, d) matrix on coefficient vectors
    k_basis: np.ndarray  # (dim_k, d) orthonormal rows
    m_basis: np.ndarray  # (dim_m, d) orthonormal rows

    @property
    def dim_k(self) -> int:
        return self.k_basis.shape[0]

    @property
    def dim_m(self) -> int:
        return self.m_basis.shape[0]

    def project_m(self, x: np.ndarray) -> np.ndarray:
        c = self.m_basis @ self.algebra.gram @ x
        return self.m_basis.T @ c

    def project_k(self, x: np.ndarray) -> np.ndarray:
        c = self.k_basis @ self.algebra.gram @ x
        return self.k_basis.T @ c


@dataclass(frozen=True)
class RootSpace:
    lambda_R: np.ndarray  # values on the cartan basis, shape (rank,)
    m_basis: np.ndarray  # (m_lambda, d)
    k_basis: np.ndarray  # (m_lambda, d)

    @property
    def multiplicity(self) -> int:
        return self.m_basis.shape[0]


@dataclass(frozen=True)
class RestrictedRootData:
    pair: SymmetricPair
    cartan_basis: np.ndarray  # (rank, d) orthonormal rows
    positive_roots: tuple[RootSpace, ...]
    centralizer_basis: np.ndarray  # (dim_h, d)

    @property
    def rank(self) -> int:
        return self.cartan_basis.shape[0]

    @property
    def dim_h(self) -> int:
        return self.centralizer_basis.shape[0]

    def covectors(self) -> np.ndarray:
        return np.array([rs.lambda_R for rs in self.positive_roots])

    def embed(self, w: np.ndarray) -> np.ndarray:
        """Algebra coefficient vector of a point with cartan coordinates w."""
        return self.cartan_basis.T @ np.asarray(w, dtype=float)

    def lambda_values(self, w: np.ndarray) -> np.ndarray:
        return self.covectors() @ np.asarray(w, dtype=float)

    def mbar_order(self) -> np.ndarray:
        """Ordered basis of mbar: a, then all m_lambda, then all k_lambda."""
        blocks = [self.cartan_basis]
        blocks += [rs.m_basis for rs in self.positive_roots]
        blocks += [rs.k_basis for rs in self.positive_roots]
        return np.vstack(blocks)


@dataclass(frozen=True)
class ChamberData:
    wall_covectors: np.ndarray  # (n_walls, rank)
    theta_max: float | None  # rank 2 only
    witness: np.ndarray  # regular point, cartan coordinates, unit norm


def _parse_space(space_id: str) -> str:
    if space_id not in CATALOG:
        raise DecompositionError(
            f"unknown space tag {space_id!r}; expected one of {CATALOG}"
        )
    return space_id


def _involution_matrix(algebra: AlgebraBasis, apply) -> np.ndarray:
    cols = [algebra.expand(apply(m)) for m in algebra.basis]
    return np.array(cols).T


def build_pair(
    space_id: str, n: int, trace_coefficient: float | None = None
) -> SymmetricPair:
    """Symmetric pair for a catalog tag.

    sphere(n) = SO(n+1)/SO(n), rp(n) shares its algebra data,
    cp(n) = SU(n+1)/S(U(1)xU(n)), hp(n) = Sp(n+1)/Sp(1)xSp(n),
    su_so(n) = SU(n)/SO(n).
    """
    _parse_space(space_id)
    ranges = {"sphere": 2, "rp": 2, "cp": 2, "hp": 1, "su_so": 3}
    if n < ranges[space_id]:
        raise DecompositionError(f"{space_id}({n}): n below minimum {ranges[space_id]}")
    if trace_coefficient is None:
        trace_coefficient = DEFAULT_TRACE_COEFFICIENT.get((space_id, n), 0.5)

    if space_id in ("sphere", "rp"):
        algebra = build_algebra("so", n + 1, trace_coefficient)
        s = np.diag([-1.0] + [1.0] * n).astype(complex)
        apply = lambda x: s @ x @ s
    elif space_id == "cp":
        algebra = build_algebra("su", n + 1, trace_coefficient)
        s = np.diag([-1.0] + [1.0] * n).astype(complex)
        apply = lambda x: s @ x @ s
    elif space_id == "hp":
        algebra = build_algebra("sp", n + 1, trace_coefficient)
        half = np.diag([-1.0] + [1.0] * n)
        s = np.block(
            [[half, np.zeros_like(half)], [np.zeros_like(half), half]]
        ).astype(complex)
        apply = lambda x: s @ x @ s
    else:  # su_so
        algebra = build_algebra("su", n, trace_coefficient)
        apply = lambda x: x.conj()

    sigma = _involution_matrix(algebra, apply)
    if np.max(np.abs(sigma @ sigma - np.eye(algebra.dim))) > 1e-10:
        raise DecompositionError("involution does not square to the identity")

    eye = np.eye(algebra.dim)
    k_basis = orthonormalize(algebra, ((eye + sigma) / 2).T)
    m_basis = orthonormalize(algebra, ((eye - sigma) / 2).T)
    if k_basis.shape[0] + m_basis.shape[0] != algebra.dim:
        raise DecompositionError("eigenspace dimensions do not add up")
    return SymmetricPair(space_id, n, algebra, sigma, k_basis, m_basis)


def _preferred_regular_element(pair: SymmetricPair) -> np.ndarray | None:
    """Deterministic generic element of m whose centralizer is the canonical
    Cartan subspace (diagonal matrices for su_so, a single root plane for the
    rank-one spaces).  Falls back to None if the guess leaves m."""
    alg = pair.algebra
    if pair.space_id == "su_so":
        x = np.zeros(alg.dim)
        for j in range(pair.n - 1):
            x += (1.0 + 0.1 * j) * alg.label_vector(f"A{j + 1}{j + 2}")
    else:
        try:
            x = alg.label_vector("B12")
        except ValueError:
            return None
    if alg.norm(x - pair.project_m(x)) > 1e-12:
        return None
    return x


def cartan_subspace(
    pair: SymmetricPair, seed: int = 0, attempts: int = 5
) -> np.ndarray:
    """Orthonormal basis of a maximal abelian subspace of m."""
    alg = pair.algebra
    rng = np.random.default_rng(seed)

    for attempt in range(attempts):
        x = _preferred_regular_element(pair) if attempt == 0 else None
        if x is None:
            x = pair.m_basis.T @ rng.standard_normal(pair.dim_m)
        # map v in m -> [x, v]; matrix with columns = coords of images
        images = np.array([alg.coords(alg.bracket(x, v)) for v in pair.m_basis]).T
        _, s, vt = np.linalg.svd(images)
        tol = max(1.0, s[0] if s.size else 1.0) * 1e-10
        null_dim = int(np.sum(np.concatenate([s, np.zeros(pair.dim_m - s.size)]) <= tol))
        gens = (vt[-null_dim:] @ pair.m_basis) if null_dim else np.empty((0, alg.dim))
        a_basis = orthonormalize(alg, gens)

        ok = all(
            alg.norm(alg.bracket(a_basis[i], a_basis[j])) <= 1e-9
            for i in range(len(a_basis))
            for j in range(i + 1, len(a_basis))
        )
        if not ok:
            continue
        # maximality: the joint centralizer of a in m must equal a
        stacked = np.vstack(
            [
                np.array([alg.coords(alg.bracket(g, v)) for v in pair.m_basis]).T
                for g in a_basis
            ]
        )
        rank = np.linalg.matrix_rank(stacked, tol=1e-9)
        if pair.dim_m - rank == len(a_basis):
            return a_basis
    raise DecompositionError("failed to certify a maximal abelian subspace")


def _indecomposable(covs: np.ndarray) -> np.ndarray:
    """Boolean mask of positive roots not expressible as a sum of two others."""
    n = covs.shape[0]
    simple = np.ones(n, dtype=bool)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if np.allclose(covs[i], covs[j] + covs[k], atol=1e-8):
                    simple[i] = False
    return simple


def _chamber_from_covectors(covs: np.ndarray) -> ChamberData:
    rank = covs.shape[1]
    simple = covs[_indecomposable(covs)]
    if simple.shape[0] == rank:
        witness = np.linalg.solve(simple, np.ones(rank))
    else:
        witness, *_ = np.linalg.lstsq(simple, np.ones(simple.shape[0]), rcond=None)
    witness = witness / np.linalg.norm(witness)
    if np.any(covs @ witness <= 0):
        raise DecompositionError("empty or inconsistent Weyl chamber")
    theta_max = None
    if rank == 2:
        rays = _chamber_rays(covs, simple)
        theta_max = float(
            np.arccos(np.clip(rays[0] @ rays[1], -1.0, 1.0))
        )
    return ChamberData(simple, theta_max, witness)


def _chamber_rays(covs: np.ndarray, simple: np.ndarray) -> np.ndarray:
    """Unit boundary rays of a rank-2 chamber, ordered [R1, R2]."""
    rays = []
    for lam in simple:
        u = np.array([-lam[1], lam[0]])
        u = u / np.linalg.norm(u)
        others = np.array([c @ u for c in covs if not np.allclose(c, lam)])
        if np.all(others >= -1e-10):
            rays.append(u)
        elif np.all(-others >= -1e-10):
            rays.append(-u)
        else:
            raise DecompositionError("wall covector does not bound the chamber")
    if len(rays) != 2:
        raise DecompositionError("rank-2 chamber must have exactly two rays")
    rays.sort(key=lambda u: np.arctan2(u[1], u[0]))
    return np.array(rays)


def restricted_root_decomposition(
    pair: SymmetricPair,
    a_basis: np.ndarray,
    seed: int = 0,
    cluster_rel_gap: float = 1e-6,
    attempts: int = 5,
) -> RestrictedRootData:
    """Diagonalize -ad_w0^2 on m at a generic regular w0 and read off roots."""
    alg = pair.algebra
    rank = a_basis.shape[0]
    rng = np.random.default_rng(seed)

    last_error = None
    for attempt in range(attempts):
        if rank == 1:
            coeffs = np.ones(1)
        else:
            coeffs = 1.0 + rng.random(rank)
        w0 = a_basis.T @ coeffs
        try:
            roots, h_basis = _decompose_at(pair, a_basis, w0, coeffs, cluster_rel_gap)
        except DecompositionError as err:
            last_error = err
            continue

        if rank == 2:
            a_basis2, roots = _align_rank2(pair, a_basis, roots)
        else:
            a_basis2 = a_basis
        covs = np.array([rs.lambda_R for rs in roots])
        chamber = _chamber_from_covectors(covs)
        order = sorted(
            range(len(roots)),
            key=lambda i: (round(covs[i] @ chamber.witness, 9), tuple(np.round(covs[i], 9))),
        )
        roots = tuple(roots[i] for i in order)
        return RestrictedRootData(pair, a_basis2, roots, h_basis)
    raise DecompositionError(f"root decomposition failed: {last_error}")


def _decompose_at(pair, a_basis, w0, coeffs, cluster_rel_gap):
    alg = pair.algebra
    rank = a_basis.shape[0]
    op = -np.array(
        [
            alg.coords(alg.bracket(w0, alg.bracket(w0, v)))
            for v in pair.m_basis
        ]
    ) @ np.array([alg.coords(v) for v in pair.m_basis]).T
    op = 0.5 * (op + op.T)
    evs, vecs = np.linalg.eigh(op)
    scale = max(1.0, evs[-1])

    clusters: list[list[int]] = [[0]]
    for i in range(1, len(evs)):
        if evs[i] - evs[i - 1] <= cluster_rel_gap * scale:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    zero_cluster = clusters[0]
    if np.mean(evs[zero_cluster]) > 1e-8 * scale or len(zero_cluster) != rank:
        raise DecompositionError("zero eigenspace of -ad_w0^2 is not the Cartan subspace")

    roots = []
    for cluster in clusters[1:]:
        lam_w0 = float(np.sqrt(np.mean(evs[cluster])))
        xi_rows = (vecs[:, cluster].T @ pair.m_basis)
        zeta_rows = np.array(
            [-(1.0 / lam_w0) * alg.bracket(w0, xi) for xi in xi_rows]
        )
        lam_vec = np.zeros(rank)
        for j, xj in enumerate(a_basis):
            values = [
                -alg.inner(alg.bracket(xj, xi_rows[s]), zeta_rows[s])
                for s in range(len(cluster))
            ]
            if np.max(np.abs(np.diff(values + [values[0]]))) > PAIRING_TOL:
                raise DecompositionError("root covector inconsistent across the cluster")
            lam_vec[j] = values[0]
        if abs(lam_vec @ coeffs - lam_w0) > 1e-7 * scale:
            raise DecompositionError("covector does not reproduce the reference value")
        roots.append(RootSpace(lam_vec, xi_rows, zeta_rows))

    total = rank + sum(r.multiplicity for r in roots)
    if total != pair.dim_m:
        raise DecompositionError("root multiplicities do not fill m")

    # centralizer of a in k: joint nullspace of ad_{X_j} restricted to k
    stacked = np.vstack(
        [
            np.array([alg.coords(alg.bracket(xj, v)) for v in pair.k_basis]).T
            for xj in a_basis
        ]
    )
    _, s, vt = np.linalg.svd(stacked)
    tol = max(1.0, s[0] if s.size else 1.0) * 1e-9
    padded = np.concatenate([s, np.zeros(pair.dim_k - s.size)])
    null_dim = int(np.sum(padded <= tol))
    if null_dim:
        h_basis = orthonormalize(alg, vt[-null_dim:] @ pair.k_basis)
    else:
        h_basis = np.empty((0, alg.dim))
    if pair.dim_k != h_basis.shape[0] + sum(r.multiplicity for r in roots):
        raise DecompositionError("k does not split into h and the k_lambda spaces")
    return roots, h_basis


def _align_rank2(pair, a_basis, roots):
    """Rotate the Cartan basis so X1 spans ray R1 and X2 points into W."""
    covs = np.array([rs.lambda_R for rs in roots])
    simple = covs[_indecomposable(covs)]
    rays = _chamber_rays(covs, simple)
    e1 = rays[0]
    e2 = rays[1] - (rays[1] @ e1) * e1
    e2 = e2 / np.linalg.norm(e2)
    rot = np.column_stack([e1, e2])  # old coords of the new axes
    new_basis = np.array([a_basis.T @ e1, a_basis.T @ e2])
    new_roots = tuple(
        RootSpace(rs.lambda_R @ rot, rs.m_basis, rs.k_basis) for rs in roots
    )
    return new_basis, new_roots


def chamber_geometry(roots: RestrictedRootData) -> ChamberData:
    return _chamber_from_covectors(roots.covectors())


@dataclass(frozen=True)
class SphereChart:
    """Chart on the chamber sphere S_W(r), in cartan coordinates."""

    roots: RestrictedRootData
    radius: float
    kind: str  # "point" | "arc" | "generic"
    j0: int = 0
    alpha: int = 0

    def point(self, theta: float | None = None) -> np.ndarray:
        if self.kind == "point":
            return np.array([self.radius])
        if self.kind == "arc":
            chamber = chamber_geometry(self.roots)
            if theta is None or not (0.0 < theta < chamber.theta_max):
                raise DecompositionError("arc parameter outside (0, theta_max)")
            return self.radius * np.array([np.cos(theta), np.sin(theta)])
        raise DecompositionError("generic charts locate points by coordinates")

    def contains(self, w: np.ndarray) -> bool:
        w = np.asarray(w, dtype=float)
        on_sphere = abs(w @ w - self.radius**2) <= 1e-9 * self.radius**2
        in_chamber = bool(np.all(self.roots.lambda_values(w) > 0))
        in_chart = ((-1.0) ** self.alpha) * w[self.j0] > 0
        return on_sphere and in_chamber and in_chart

    def tangent_indices(self) -> list[int]:
        return [j for j in range(self.roots.rank) if j != self.j0]

    def y_field(self, w: np.ndarray, j: int) -> np.ndarray:
        """Y_j(w) = x_j X_{j0} - x_{j0} X_j, in cartan coordinates."""
        w = np.asarray(w, dtype=float)
        out = np.zeros(self.roots.rank)
        out[self.j0] = w[j]
        out[j] = -w[self.j0]
        return out


def sphere_chart(
    roots: RestrictedRootData, radius: float, selector: str | tuple = "auto"
) -> SphereChart:
    if radius <= 0:
        raise DecompositionError("radius must be positive")
    rank = roots.rank
    if selector == "auto":
        if rank == 1:
            return SphereChart(roots, radius, "point")
        if rank == 2:
            return SphereChart(roots, radius, "arc", j0=1, alpha=0)
        witness = chamber_geometry(roots).witness
        j0 = int(np.argmax(np.abs(witness)))
        alpha = 0 if witness[j0] > 0 else 1
        return SphereChart(roots, radius, "generic", j0=j0, alpha=alpha)
    if isinstance(selector, tuple) and selector[0] == "generic":
        _, j0, alpha = selector
        if not (0 <= j0 < rank and alpha in (0, 1)):
            raise DecompositionError("bad generic chart parameters")
        return SphereChart(roots, radius, "generic", j0=j0, alpha=alpha)
    raise DecompositionError(f"unknown chart selector {selector!r}")


def connection_bilinear(
    pair: SymmetricPair, mu1: np.ndarray, mu2: np.ndarray
) -> np.ndarray:
    """alpha(mu1, mu2) = 1/2 [mu1, mu2]_m + U(mu1, mu2); zero for symmetric pairs."""
    alg = pair.algebra
    rhs = np.array(
        [
            0.5
            * (
                alg.inner(pair.project_m(alg.bracket(m3, mu1)), mu2)
                + alg.inner(pair.project_m(alg.bracket(m3, mu2)), mu1)
            )
            for m3 in pair.m_basis
        ]
    )
    gram_m = pair.m_basis @ alg.gram @ pair.m_basis.T
    u = pair.m_basis.T @ np.linalg.solve(gram_m, rhs)
    return 0.5 * pair.project_m(alg.bracket(mu1, mu2)) + u


def adjoint_action(
    pair: SymmetricPair, k: np.ndarray, x: np.ndarray
) -> np.ndarray:
    """Coefficients of Ad_k x = k X k^{-1}; raises if k is not in the group."""
    mat = pair.algebra.matrix_of(x)
    try:
        return pair.algebra.expand(k @ mat @ np.linalg.inv(k))
    except AlgebraError as err:
        raise AlgebraError(f"adjoint image left the algebra: {err}") from err


# ---------------------------------------------------------------------------
# normalization and cached decompositions

# Rank-one spaces use the inner-product scale for which the top restricted
# root takes the value 1 on the unit Cartan vector, so the closed-form
# rank-one metrics hold with their printed coefficients.  sphere/rp already
# satisfy this at c' = 1/2; cp and hp are rescaled at build time.
DEFAULT_TRACE_COEFFICIENT: dict[tuple[str, int], float] = {}

_RANK_ONE = ("sphere", "rp", "cp", "hp")


def _top_root_scale(space_id: str, n: int, c: float) -> float:
    pair = build_pair(space_id, n, trace_coefficient=c)
    a_basis = cartan_subspace(pair)
    roots = restricted_root_decomposition(pair, a_basis)
    return float(max(roots.lambda_values(np.ones(roots.rank) / np.sqrt(roots.rank))))


def _normalized_coefficient(space_id: str, n: int) -> float:
    key = (space_id, n)
    if key not in DEFAULT_TRACE_COEFFICIENT:
        if space_id in _RANK_ONE:
            s = _top_root_scale(space_id, n, 0.5)
            DEFAULT_TRACE_COEFFICIENT[key] = 0.5 * s * s
        else:
            DEFAULT_TRACE_COEFFICIENT[key] = 0.5
    return DEFAULT_TRACE_COEFFICIENT[key]


@lru_cache(maxsize=None)
def decompose_space(
    space_id: str,
    n: int,
    trace_coefficient: float | None = None,
    seed: int = 0,
) -> RestrictedRootData:
    """Full decomposition for a catalog space, with per-space normalization."""
    if trace_coefficient is None:
        trace_coefficient = _normalized_coefficient(space_id, n)
    pair = build_pair(space_id, n, trace_coefficient=trace_coefficient)
    a_basis = cartan_subspace(pair, seed=seed)
    return restricted_root_decomposition(pair, a_basis, seed=seed)


# ---------------------------------------------------------------------------
# JSON schema (version 1)


def _complex_to_lists(mat: np.ndarray) -> list:
    return [np.real(mat).tolist(), np.imag(mat).tolist()]


def _complex_from_lists(data: list) -> np.ndarray:
    return np.array(data[0]) + 1j * np.array(data[1])


def roots_to_dict(roots: RestrictedRootData) -> dict:
    pair = roots.pair
    alg = pair.algebra
    return {
        "schema": 1,
        "space_id": pair.space_id,
        "n": pair.n,
        "algebra": {
            "name": alg.name,
            "n": alg.n,
            "trace_coefficient": alg.trace_coefficient,
        },
        "involution": pair.involution.tolist(),
        "k_basis": pair.k_basis.tolist(),
        "m_basis": pair.m_basis.tolist(),
        "cartan_basis": roots.cartan_basis.tolist(),
        "centralizer_basis": roots.centralizer_basis.tolist(),
        "positive_roots": [
            {
                "lambda_R": rs.lambda_R.tolist(),
                "multiplicity": rs.multiplicity,
                "m_basis": rs.m_basis.tolist(),
                "k_basis": rs.k_basis.tolist(),
            }
            for rs in roots.positive_roots
        ],
        "structure_constants": alg.structure_constants.tolist(),
    }


def roots_from_dict(data: dict) -> RestrictedRootData:
    if data.get("schema") != 1:
        raise DecompositionError("unsupported decomposition schema")
    spec = data["algebra"]
    alg = build_algebra(spec["name"], spec["n"], spec["trace_coefficient"])
    if np.max(np.abs(alg.structure_constants - np.array(data["structure_constants"]))) != 0.0:
        raise DecompositionError("structure constants do not round-trip exactly")
    pair = SymmetricPair(
        data["space_id"],
        data["n"],
        alg,
        np.array(data["involution"]),
        np.array(data["k_basis"]),
        np.array(data["m_basis"]),
    )
    roots = tuple(
        RootSpace(
            np.array(rs["lambda_R"]),
            np.array(rs["m_basis"]),
            np.array(rs["k_basis"]),
        )
        for rs in data["positive_roots"]
    )
    return RestrictedRootData(
        pair,
        np.array(data["cartan_basis"]),
        roots,
        np.array(data["centralizer_basis"]),
    )


def roots_to_json(roots: RestrictedRootData) -> str:
    return json.dumps(roots_to_dict(roots), sort_keys=True, indent=1)


def roots_from_json(text: str) -> RestrictedRootData:
    return roots_from_dict(json.loads(text))
