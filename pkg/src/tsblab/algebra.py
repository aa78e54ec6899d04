"""Classical compact matrix Lie algebras with explicit real bases.

Catalog: so(n) (real antisymmetric), su(n) (traceless skew-Hermitian) and
sp(n) (realized inside u(2n)).  Each algebra carries an ordered basis, the
inner product <X,Y> = -c' * trace(XY), structure constants, and the Gram
matrix of the basis.  All vector-space arithmetic happens on real
coefficient vectors over the ordered basis; complex matrices appear only
inside matrix products.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg

EXPANSION_TOL = 1e-10


class AlgebraError(ValueError):
    """Unsupported catalog id, bad size, or element outside the algebra."""


def _E(n: int, j: int, k: int) -> np.ndarray:
    m = np.zeros((n, n), dtype=complex)
    m[j, k] = 1.0
    return m


def _so_basis(n: int) -> tuple[list[np.ndarray], list[str]]:
    mats, labels = [], []
    for j in range(n):
        for k in range(j + 1, n):
            mats.append(_E(n, j, k) - _E(n, k, j))
            labels.append(f"B{j + 1}{k + 1}")
    return mats, labels


def _su_basis(n: int) -> tuple[list[np.ndarray], list[str]]:
    # Ordered A_{j,j+1}, then C_{jk} (j<k), then B_{jk} (j<k).
    mats, labels = [], []
    for j in range(n - 1):
        mats.append(1j * (_E(n, j, j) - _E(n, j + 1, j + 1)))
        labels.append(f"A{j + 1}{j + 2}")
    for j in range(n):
        for k in range(j + 1, n):
            mats.append(1j * (_E(n, j, k) + _E(n, k, j)))
            labels.append(f"C{j + 1}{k + 1}")
    for j in range(n):
        for k in range(j + 1, n):
            mats.append(_E(n, j, k) - _E(n, k, j))
            labels.append(f"B{j + 1}{k + 1}")
    return mats, labels


def _sp_embed(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """[[a, b], [-conj(b), conj(a)]] with a skew-Hermitian, b symmetric."""
    return np.block([[a, b], [-b.conj(), a.conj()]])


def _sp_basis(n: int) -> tuple[list[np.ndarray], list[str]]:
    z = np.zeros((n, n), dtype=complex)
    mats, labels = [], []
    for j in range(n):
        mats.append(_sp_embed(1j * _E(n, j, j), z))
        labels.append(f"iH{j + 1}")
    for j in range(n):
        for k in range(j + 1, n):
            mats.append(_sp_embed(_E(n, j, k) - _E(n, k, j), z))
            labels.append(f"B{j + 1}{k + 1}")
            mats.append(_sp_embed(1j * (_E(n, j, k) + _E(n, k, j)), z))
            labels.append(f"C{j + 1}{k + 1}")
    for j in range(n):
        mats.append(_sp_embed(z, _E(n, j, j)))
        labels.append(f"S{j + 1}{j + 1}")
        mats.append(_sp_embed(z, 1j * _E(n, j, j)))
        labels.append(f"iS{j + 1}{j + 1}")
    for j in range(n):
        for k in range(j + 1, n):
            mats.append(_sp_embed(z, _E(n, j, k) + _E(n, k, j)))
            labels.append(f"S{j + 1}{k + 1}")
            mats.append(_sp_embed(z, 1j * (_E(n, j, k) + _E(n, k, j))))
            labels.append(f"iS{j + 1}{k + 1}")
    return mats, labels


_EXPECTED_DIM = {
    "so": lambda n: n * (n - 1) // 2,
    "su": lambda n: n * n - 1,
    "sp": lambda n: n * (2 * n + 1),
}


@dataclass(frozen=True)
class AlgebraBasis:
    """A matrix Lie algebra as an ordered real basis with structure constants.

    structure_constants f has shape (dim, dim, dim) with
    [e_i, e_j] = sum_k f[k, i, j] e_k.
    """

    name: str
    n: int
    basis: np.ndarray  # (dim, m, m) complex
    labels: tuple[str, ...]
    trace_coefficient: float
    gram: np.ndarray  # (dim, dim)
    structure_constants: np.ndarray  # (dim, dim, dim)
    _chol: np.ndarray = field(repr=False, default=None)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def matrix_of(self, x: np.ndarray) -> np.ndarray:
        """Matrix realization of a coefficient vector."""
        return np.einsum("i,iab->ab", np.asarray(x, dtype=float), self.basis)

    def expand(self, mat: np.ndarray, tol: float = EXPANSION_TOL) -> np.ndarray:
        """Coefficients of a matrix over the basis; raises if not in the span."""
        b = -self.trace_coefficient * np.real(
            np.einsum("iab,ba->i", self.basis, mat)
        )
        coeff = np.linalg.solve(self.gram, b)
        residual = np.linalg.norm(self.matrix_of(coeff) - mat)
        if residual > tol * max(1.0, np.linalg.norm(mat)):
            raise AlgebraError(
                f"matrix not in the span of the {self.name}({self.n}) basis "
                f"(residual {residual:.3e})"
            )
        return coeff

    def inner(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(x @ self.gram @ y)

    def norm(self, x: np.ndarray) -> float:
        return float(np.sqrt(max(0.0, self.inner(x, x))))

    def bracket(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Coefficients of [x, y] = xy - yx, via the structure constants."""
        return np.einsum("kij,i,j->k", self.structure_constants, x, y)

    def coords(self, x: np.ndarray) -> np.ndarray:
        """Coordinates of x in an orthonormalized frame (Cholesky of gram)."""
        return self._chol.T @ x

    def from_coords(self, c: np.ndarray) -> np.ndarray:
        return np.linalg.solve(self._chol.T, c)

    def label_vector(self, label: str) -> np.ndarray:
        """Unit coefficient vector of a named basis element."""
        e = np.zeros(self.dim)
        e[self.labels.index(label)] = 1.0
        return e


def build_algebra(name: str, n: int, trace_coefficient: float = 0.5) -> AlgebraBasis:
    """Construct a catalog algebra ("so", "su" or "sp") of size n."""
    if name not in _EXPECTED_DIM:
        raise AlgebraError(f"unsupported algebra {name!r}; expected so, su or sp")
    minimum = 1 if name == "sp" else 2
    if n < minimum:
        raise AlgebraError(f"{name}({n}): size below minimum {minimum}")
    if trace_coefficient <= 0:
        raise AlgebraError("trace_coefficient must be positive")
    mats, labels = {"so": _so_basis, "su": _su_basis, "sp": _sp_basis}[name](n)
    basis = np.array(mats)
    dim = basis.shape[0]
    assert dim == _EXPECTED_DIM[name](n)

    gram = -trace_coefficient * np.real(np.einsum("iab,jba->ij", basis, basis))
    gram = 0.5 * (gram + gram.T)
    chol = np.linalg.cholesky(gram)

    # Structure constants by least-squares expansion against the Gram matrix.
    comm = np.einsum("iab,jbc->ijac", basis, basis)
    comm = comm - np.transpose(comm, (1, 0, 2, 3))
    rhs = -trace_coefficient * np.real(np.einsum("kab,ijba->kij", basis, comm))
    f = np.linalg.solve(gram, rhs.reshape(dim, -1)).reshape(dim, dim, dim)
    recon = np.einsum("kij,kab->ijab", f, basis)
    if np.max(np.abs(recon - comm)) > EXPANSION_TOL * max(1.0, np.max(np.abs(comm))):
        raise AlgebraError("basis is not closed under the bracket")

    return AlgebraBasis(
        name=name,
        n=n,
        basis=basis,
        labels=tuple(labels),
        trace_coefficient=trace_coefficient,
        gram=gram,
        structure_constants=f,
        _chol=chol,
    )


@lru_cache(maxsize=None)
def cached_algebra(name: str, n: int, trace_coefficient: float = 0.5) -> AlgebraBasis:
    return build_algebra(name, n, trace_coefficient)


def killing_form(algebra: AlgebraBasis) -> tuple[np.ndarray, float]:
    """Gram matrix of the Killing form and its ratio to the trace form.

    Returns (gram_B, rho) with B(X, Y) = rho * trace(XY); the fit residual
    against the trace form must be negligible for catalog algebras.
    """
    f = algebra.structure_constants
    gram_b = np.einsum("lik,kjl->ij", f, f)
    gram_b = 0.5 * (gram_b + gram_b.T)
    trace_gram = -algebra.gram / algebra.trace_coefficient
    rho = float(np.sum(gram_b * trace_gram) / np.sum(trace_gram * trace_gram))
    residual = np.max(np.abs(gram_b - rho * trace_gram))
    if residual > 1e-8 * max(1.0, np.max(np.abs(gram_b))):
        raise AlgebraError(
            f"Killing form is not proportional to the trace form "
            f"(residual {residual:.3e})"
        )
    return gram_b, rho


def ad_operator(
    algebra: AlgebraBasis,
    x: np.ndarray,
    domain: list[np.ndarray],
    codomain: list[np.ndarray],
) -> np.ndarray:
    """Matrix of v -> proj_codomain [x, v] in the given subspace bases."""
    dom = np.asarray(domain, dtype=float)
    cod = np.asarray(codomain, dtype=float)
    gram_cod = cod @ algebra.gram @ cod.T
    if np.linalg.matrix_rank(gram_cod, tol=1e-10) < cod.shape[0]:
        raise AlgebraError("degenerate codomain basis")
    images = np.array([algebra.bracket(x, v) for v in dom])
    rhs = cod @ algebra.gram @ images.T
    return np.linalg.solve(gram_cod, rhs)


def exp_matrix(algebra: AlgebraBasis, x: np.ndarray) -> np.ndarray:
    """Group element exp(x) as a matrix (scaling-and-squaring Pade)."""
    return scipy.linalg.expm(algebra.matrix_of(x))


def jacobi_residual(algebra: AlgebraBasis) -> float:
    """Max norm of the Jacobi identity over all basis triples."""
    f = algebra.structure_constants
    jac = (
        np.einsum("mij,lmk->lijk", f, f)
        + np.einsum("mjk,lmi->lijk", f, f)
        + np.einsum("mki,lmj->lijk", f, f)
    )
    # Coefficient-space residual converted to matrix norm via the Gram metric.
    sq = np.einsum("lijk,lm,mijk->ijk", jac, algebra.gram, jac)
    return float(np.sqrt(np.max(np.abs(sq))))


def ad_invariance_residual(algebra: AlgebraBasis) -> float:
    """Max of |<[z,x],y> + <x,[z,y]>| over basis triples."""
    f = algebra.structure_constants
    # <[e_z, e_x], e_y> = f[k, z, x] gram[k, y]
    t = np.einsum("kzx,ky->zxy", f, algebra.gram)
    return float(np.max(np.abs(t + np.transpose(t, (0, 2, 1)))))


def orthonormalize(
    algebra: AlgebraBasis, vectors: np.ndarray, tol: float = 1e-10
) -> np.ndarray:
    """Orthonormal basis (rows) for the span of the given rows, w.r.t. gram."""
    v = np.atleast_2d(np.asarray(vectors, dtype=float))
    coords = v @ algebra._chol  # rows in orthonormal coordinates
    u, s, _ = np.linalg.svd(coords.T, full_matrices=False)
    rank = int(np.sum(s > tol * max(1.0, s[0] if len(s) else 1.0)))
    ortho_coords = u[:, :rank].T
    return np.array([algebra.from_coords(c) for c in ortho_coords])
