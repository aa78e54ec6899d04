"""Frame-field calculus at orbit representatives (o_H, w).

Tangent values are pairs (mbar-component, W-component): an algebra
coefficient vector lying in mbar = a + sum m_lambda + sum k_lambda, and a
vector of Cartan coordinates for the W-slot.  Invariant tensor identities
are evaluated pointwise on frames assembled from constant and linear
invariant fields; brackets of invariant fields combine the algebra bracket
(projected to mbar) with directional derivatives along W-components.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

from .qcatalog import Coefficients, StructureProfile, realize, standard_profile
from .symspace import RestrictedRootData, chamber_geometry

FD_STEP = 1e-5


class FrameError(ValueError):
    """Unsupported frame mode or a value outside the frame span."""


@dataclass(frozen=True)
class TangentValue:
    mbar: np.ndarray  # algebra coefficients, shape (d,)
    a: np.ndarray  # W-slot in cartan coordinates, shape (rank,)

    def __add__(self, other: "TangentValue") -> "TangentValue":
        return TangentValue(self.mbar + other.mbar, self.a + other.a)

    def __sub__(self, other: "TangentValue") -> "TangentValue":
        return TangentValue(self.mbar - other.mbar, self.a - other.a)

    def __mul__(self, c: float) -> "TangentValue":
        return TangentValue(self.mbar * c, self.a * c)

    __rmul__ = __mul__


def zero_value(roots: RestrictedRootData) -> TangentValue:
    return TangentValue(
        np.zeros(roots.pair.algebra.dim), np.zeros(roots.rank)
    )


@dataclass(frozen=True)
class InvariantField:
    """value: w -> TangentValue; optional analytic directional derivative."""

    value: Callable[[np.ndarray], TangentValue]
    analytic_deriv: Callable[[np.ndarray, np.ndarray], TangentValue] | None = None

    def deriv(self, w: np.ndarray, direction: np.ndarray) -> TangentValue:
        if self.analytic_deriv is not None:
            return self.analytic_deriv(w, direction)
        return richardson_derivative(self.value, w, direction)


def richardson_derivative(f, w, direction, h: float = FD_STEP):
    """Richardson-extrapolated central difference along a W-direction."""

    def central(step):
        return (f(w + step * direction) - f(w - step * direction)) * (
            1.0 / (2.0 * step)
        )

    return central(h) * (4.0 / 3.0) - central(2.0 * h) * (1.0 / 3.0)


def richardson_scalar(f, w, direction, h: float = FD_STEP) -> float:
    def central(step):
        return (f(w + step * direction) - f(w - step * direction)) / (2.0 * step)

    return (4.0 * central(h) - central(2.0 * h)) / 3.0


# ---------------------------------------------------------------------------
# root-space splitting


class Splitter:
    """Decomposes mbar vectors into a-, m_lambda- and k_lambda-coordinates."""

    def __init__(self, roots: RestrictedRootData):
        self.roots = roots
        gram = roots.pair.algebra.gram
        self._a = roots.cartan_basis @ gram
        self._m = [rs.m_basis @ gram for rs in roots.positive_roots]
        self._k = [rs.k_basis @ gram for rs in roots.positive_roots]
        self._mbar = roots.mbar_order()
        self._mbar_proj = self._mbar.T @ (self._mbar @ gram)

    def a_coords(self, x: np.ndarray) -> np.ndarray:
        return self._a @ x

    def m_coords(self, i: int, x: np.ndarray) -> np.ndarray:
        return self._m[i] @ x

    def k_coords(self, i: int, x: np.ndarray) -> np.ndarray:
        return self._k[i] @ x

    def mbar_project(self, x: np.ndarray) -> np.ndarray:
        return self._mbar_proj @ x

    def h_norm(self, x: np.ndarray) -> float:
        return self.roots.pair.algebra.norm(x - self.mbar_project(x))

    def rebuild(self, a, m_parts, k_parts) -> np.ndarray:
        """Inverse of the coordinate split."""
        roots = self.roots
        out = roots.cartan_basis.T @ a
        for i, rs in enumerate(roots.positive_roots):
            out = out + rs.m_basis.T @ m_parts[i] + rs.k_basis.T @ k_parts[i]
        return out


def field_bracket(
    A: InvariantField, B: InvariantField, w: np.ndarray, split: Splitter
) -> tuple[TangentValue, float]:
    """Bracket of invariant fields; returns (value, discarded h-norm)."""
    alg = split.roots.pair.algebra
    av, bv = A.value(w), B.value(w)
    br = alg.bracket(av.mbar, bv.mbar)
    h_norm = split.h_norm(br)
    result = TangentValue(split.mbar_project(br), np.zeros(split.roots.rank))
    if np.linalg.norm(av.a) > 0:
        d = B.deriv(w, av.a)
        result = result + d
    if np.linalg.norm(bv.a) > 0:
        d = A.deriv(w, bv.a)
        result = result - d
    return result, h_norm


# ---------------------------------------------------------------------------
# frames


def _const_field(roots, mbar_vec, a_vec=None) -> InvariantField:
    rank = roots.rank
    a_vec = np.zeros(rank) if a_vec is None else np.asarray(a_vec, dtype=float)
    tv = TangentValue(np.asarray(mbar_vec, dtype=float), a_vec)
    zero = zero_value(roots)
    return InvariantField(lambda w: tv, lambda w, d: zero)


def _xi_s_field(roots, radius) -> InvariantField:
    """Standard field xi^S: w -> (w/r, 0), extended off the sphere."""
    cart = roots.cartan_basis

    def value(w):
        return TangentValue(cart.T @ (np.asarray(w) / radius), np.zeros(roots.rank))

    def deriv(w, direction):
        return TangentValue(
            cart.T @ (np.asarray(direction) / radius), np.zeros(roots.rank)
        )

    return InvariantField(value, deriv)


def _y_field(roots, j0, j) -> InvariantField:
    cart = roots.cartan_basis
    rank = roots.rank

    def coords(w):
        out = np.zeros(rank)
        out[j0] = w[j]
        out[j] = -w[j0]
        return out

    def value(w):
        return TangentValue(cart.T @ coords(w), np.zeros(rank))

    def deriv(w, d):
        return TangentValue(cart.T @ coords(d), np.zeros(rank))

    return InvariantField(value, deriv)


def _p_field(roots, j0, j) -> InvariantField:
    rank = roots.rank
    d = roots.pair.algebra.dim

    def coords(w):
        out = np.zeros(rank)
        out[j0] = w[j]
        out[j] = -w[j0]
        return out

    def value(w):
        return TangentValue(np.zeros(d), coords(w))

    def deriv(w, dd):
        return TangentValue(np.zeros(d), coords(dd))

    return InvariantField(value, deriv)


@dataclass(frozen=True)
class FrameAtPoint:
    roots: RestrictedRootData
    w: np.ndarray
    chart: str  # "full" | "sphere"
    radius: float | None
    fields: tuple[InvariantField, ...]
    labels: tuple[str, ...]
    split: Splitter = dc_field(repr=False, default=None)
    j0: int = 0

    @property
    def dim(self) -> int:
        return len(self.fields)

    def values(self) -> list[TangentValue]:
        return [f.value(self.w) for f in self.fields]

    def _coord(self, tv: TangentValue) -> np.ndarray:
        alg = self.roots.pair.algebra
        return np.concatenate([alg.coords(tv.mbar), tv.a])

    def expand(self, tv: TangentValue, tol: float = 1e-8) -> np.ndarray:
        mat = np.array([self._coord(f.value(self.w)) for f in self.fields]).T
        target = self._coord(tv)
        coeff, *_ = np.linalg.lstsq(mat, target, rcond=None)
        residual = np.linalg.norm(mat @ coeff - target)
        if residual > tol * max(1.0, np.linalg.norm(target)):
            raise FrameError(f"value outside the frame span (residual {residual:.2e})")
        return coeff

    def index(self, label: str) -> int:
        return self.labels.index(label)


def _root_block(roots):
    fields, labels = [], []
    for i, rs in enumerate(roots.positive_roots):
        for s in range(rs.multiplicity):
            fields.append((rs.m_basis[s], f"xi[{i}]{s + 1}"))
        for s in range(rs.multiplicity):
            fields.append((rs.k_basis[s], f"zeta[{i}]{s + 1}"))
    return fields


def full_w_frame(roots: RestrictedRootData, w: np.ndarray) -> FrameAtPoint:
    """Frame [(X_j,0), (0,d/dx_j), (xi^s,0), (zeta^s,0)] at a chamber point."""
    w = np.asarray(w, dtype=float)
    if np.any(roots.lambda_values(w) <= 1e-10 * np.linalg.norm(w)):
        raise FrameError("frame point lies on a chamber wall")
    fields, labels = [], []
    for j, xj in enumerate(roots.cartan_basis):
        fields.append(_const_field(roots, xj))
        labels.append(f"X{j + 1}")
    for j in range(roots.rank):
        e = np.zeros(roots.rank)
        e[j] = 1.0
        fields.append(_const_field(roots, np.zeros(roots.pair.algebra.dim), e))
        labels.append(f"dx{j + 1}")
    for vec, lab in _root_block(roots):
        fields.append(_const_field(roots, vec))
        labels.append(lab)
    return FrameAtPoint(
        roots, w, "full", None, tuple(fields), tuple(labels), Splitter(roots)
    )


def sphere_frame(
    roots: RestrictedRootData, radius: float, w: np.ndarray, j0: int | None = None
) -> FrameAtPoint:
    """Frame [xi^S, (Y_j,0), (0,P_j) (j != j0), root vectors] on G/H x S_W(r)."""
    w = np.asarray(w, dtype=float)
    if abs(w @ w - radius**2) > 1e-9 * radius**2:
        raise FrameError("point is not on the chamber sphere of this radius")
    if np.any(roots.lambda_values(w) <= 1e-10 * np.linalg.norm(w)):
        raise FrameError("frame point lies on a chamber wall")
    rank = roots.rank
    if j0 is None:
        j0 = int(np.argmax(np.abs(w)))
    if abs(w[j0]) <= 1e-12:
        raise FrameError("chart coordinate vanishes at this point")
    fields = [_xi_s_field(roots, radius)]
    labels = ["xiS"]
    for j in range(rank):
        if j == j0:
            continue
        fields.append(_y_field(roots, j0, j))
        labels.append(f"Y{j + 1}")
    for j in range(rank):
        if j == j0:
            continue
        fields.append(_p_field(roots, j0, j))
        labels.append(f"P{j + 1}")
    for vec, lab in _root_block(roots):
        fields.append(_const_field(roots, vec))
        labels.append(lab)
    return FrameAtPoint(
        roots, w, "sphere", radius, tuple(fields), tuple(labels), Splitter(roots), j0
    )


# ---------------------------------------------------------------------------
# tensors


def metric_value(
    split: Splitter, co: Coefficients, t1: TangentValue, t2: TangentValue
) -> float:
    """g = a0^2(<,>_a + <,>_W) + sum a_l <,>_{m_l} + b_l <,>_{k_l}."""
    total = co.a0**2 * (
        float(split.a_coords(t1.mbar) @ split.a_coords(t2.mbar)) + float(t1.a @ t2.a)
    )
    for i in range(len(split.roots.positive_roots)):
        total += co.a_lam[i] * float(split.m_coords(i, t1.mbar) @ split.m_coords(i, t2.mbar))
        total += co.b_lam[i] * float(split.k_coords(i, t1.mbar) @ split.k_coords(i, t2.mbar))
    return total


def _apply_complex(split, q_lam, tv: TangentValue, mode: str, w=None) -> TangentValue:
    """J^q (mode full) or phi^q (mode sphere) applied to a tangent value.

    Full mode swaps the a- and W-slots; sphere mode swaps the Y- and
    P-directions orthogonal to w and kills the radial direction.  Root
    spaces transform by xi -> -(1/q) zeta, zeta -> q xi in both modes.
    """
    roots = split.roots
    a_part = split.a_coords(tv.mbar)
    if mode == "full":
        new_a_slot = a_part
        new_a_part = -tv.a
    else:
        w = np.asarray(w, dtype=float)
        n = w / np.linalg.norm(w)
        new_a_slot = a_part - (a_part @ n) * n
        v = tv.a - (tv.a @ n) * n
        new_a_part = -v
    m_parts, k_parts = [], []
    for i in range(len(roots.positive_roots)):
        m = split.m_coords(i, tv.mbar)
        k = split.k_coords(i, tv.mbar)
        m_parts.append(q_lam[i] * k)
        k_parts.append(-(1.0 / q_lam[i]) * m)
    return TangentValue(split.rebuild(new_a_part, m_parts, k_parts), new_a_slot)


@dataclass(frozen=True)
class TensorPack:
    frame: FrameAtPoint
    coefficients: Coefficients
    g: np.ndarray
    J_or_phi: np.ndarray
    omega: np.ndarray
    dtheta: np.ndarray
    eta: np.ndarray | None = None  # sphere mode
    xi: np.ndarray | None = None  # sphere mode, frame coefficients

    def j_squared_residual(self) -> float:
        J = self.J_or_phi
        if self.eta is None:
            return float(np.max(np.abs(J @ J + np.eye(len(J)))))
        return float(
            np.max(np.abs(J @ J + np.eye(len(J)) - np.outer(self.xi, self.eta)))
        )

    def compatibility_residual(self) -> float:
        J = self.J_or_phi
        g2 = J.T @ self.g @ J
        if self.eta is None:
            return float(np.max(np.abs(g2 - self.g)))
        return float(np.max(np.abs(g2 - self.g + np.outer(self.eta, self.eta))))


def _eta_scalar(split, co, radius, w, tv: TangentValue) -> float:
    return co.a0 / radius * float(split.a_coords(tv.mbar) @ np.asarray(w))


def xi_field(roots, radius, a0) -> InvariantField:
    base = _xi_s_field(roots, radius)
    return InvariantField(
        lambda w: base.value(w) * (1.0 / a0),
        lambda w, d: base.deriv(w, d) * (1.0 / a0),
    )


def dtheta_at(frame: FrameAtPoint) -> np.ndarray:
    """dtheta((mu,u),(nu,v)) = (1/2)(<u,nu> - <v,mu> - <[w,mu],nu>)."""
    alg = frame.roots.pair.algebra
    split = frame.split
    w_alg = frame.roots.embed(frame.w)
    vals = frame.values()
    n = frame.dim
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            mu, u = vals[i].mbar, vals[i].a
            nu, v = vals[j].mbar, vals[j].a
            term = (
                float(u @ split.a_coords(nu))
                - float(v @ split.a_coords(mu))
                - alg.inner(alg.bracket(w_alg, mu), nu)
            )
            out[i, j] = 0.5 * term
            out[j, i] = -out[i, j]
    return out


def structure_at(frame: FrameAtPoint, sp: StructureProfile) -> TensorPack:
    roots, split, w = frame.roots, frame.split, frame.w
    co = realize(sp, roots, w)
    vals = frame.values()
    n = frame.dim
    mode = frame.chart

    g = np.array(
        [[metric_value(split, co, vals[i], vals[j]) for j in range(n)] for i in range(n)]
    )
    g = 0.5 * (g + g.T)
    jvals = [_apply_complex(split, co.q_lam, v, mode, w) for v in vals]
    J = np.array([frame.expand(jv) for jv in jvals]).T
    omega = np.array(
        [[metric_value(split, co, vals[i], jvals[j]) for j in range(n)] for i in range(n)]
    )
    dth = dtheta_at(frame)

    eta = xi = None
    if mode == "sphere":
        eta = np.array(
            [_eta_scalar(split, co, frame.radius, w, v) for v in vals]
        )
        xi = frame.expand(xi_field(roots, frame.radius, co.a0).value(w))
    return TensorPack(frame, co, g, J, omega, dth, eta, xi)


def standard_structure_at(frame: FrameAtPoint) -> TensorPack:
    """Structure of the standard (Sasaki) profile q = id, a0 = 1, ak rule."""
    sp = StructureProfile(
        q=standard_profile().q, a0_recipe="const", alambda_recipe="ak", kappa=1.0
    )
    return structure_at(frame, sp)


def deta_at(frame: FrameAtPoint, sp: StructureProfile) -> np.ndarray:
    """dEta(A,B) = (1/2)(A(eta B) - B(eta A) - eta([A,B])), independent of
    the metric route dEta = g(., phi .)."""
    if frame.chart != "sphere":
        raise FrameError("eta lives on sphere frames")
    roots, split = frame.roots, frame.split
    co = realize(sp, roots, frame.w)
    r = frame.radius

    def eta_of(field):
        return lambda w: _eta_scalar(split, co, r, w, field.value(w))

    n = frame.dim
    vals = frame.values()
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            A, B = frame.fields[i], frame.fields[j]
            term = 0.0
            if np.linalg.norm(vals[i].a) > 0:
                term += richardson_scalar(eta_of(B), frame.w, vals[i].a)
            if np.linalg.norm(vals[j].a) > 0:
                term -= richardson_scalar(eta_of(A), frame.w, vals[j].a)
            br, _ = field_bracket(A, B, frame.w, split)
            term -= _eta_scalar(split, co, r, frame.w, br)
            out[i, j] = 0.5 * term
            out[j, i] = -out[i, j]
    return out


def lie_derivative_metric(frame: FrameAtPoint, sp: StructureProfile) -> np.ndarray:
    """(L_xi g)(A,B) = -g([xi,A],B) - g(A,[xi,B]) for xi = xi^S/a0 (the
    xi(g(A,B)) term vanishes: xi has no W-component)."""
    if frame.chart != "sphere":
        raise FrameError("the Lie derivative check runs on sphere frames")
    roots, split = frame.roots, frame.split
    co = realize(sp, roots, frame.w)
    xi = xi_field(roots, frame.radius, co.a0)
    vals = frame.values()
    n = frame.dim
    brackets = [field_bracket(xi, f, frame.w, split)[0] for f in frame.fields]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            out[i, j] = -metric_value(split, co, brackets[i], vals[j]) - metric_value(
                split, co, vals[i], brackets[j]
            )
            out[j, i] = out[i, j]
    return out


def _structure_field(frame, sp, field: InvariantField) -> InvariantField:
    """The field w -> J^q(w)[A(w)] (or phi^q on sphere frames)."""
    roots, split, mode = frame.roots, frame.split, frame.chart

    def value(w):
        co = realize(sp, roots, w, allow_wall=True)
        return _apply_complex(split, co.q_lam, field.value(w), mode, w)

    return InvariantField(value)


@dataclass(frozen=True)
class PairTensor:
    """Vector-valued antisymmetric tensor evaluated on all frame pairs."""

    frame: FrameAtPoint
    values: list  # values[i][j] = TangentValue
    norms: np.ndarray
    max_norm: float
    discarded_h_norm: float

    def component(self, i: int, j: int, direction_label: str) -> float:
        """Coefficient of the named frame direction in values[i][j]."""
        coeff = self.frame.expand(self.values[i][j])
        return float(coeff[self.frame.index(direction_label)])


def _pair_tensor(frame, sp, tensor_fn) -> PairTensor:
    roots, split = frame.roots, frame.split
    co = realize(sp, roots, frame.w)
    n = frame.dim
    values = [[zero_value(roots) for _ in range(n)] for _ in range(n)]
    norms = np.zeros((n, n))
    h_max = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            tv, h = tensor_fn(i, j)
            h_max = max(h_max, h)
            values[i][j] = tv
            values[j][i] = tv * (-1.0)
            norms[i, j] = norms[j, i] = np.sqrt(
                max(0.0, metric_value(split, co, tv, tv))
            )
    return PairTensor(frame, values, norms, float(norms.max()), h_max)


def nijenhuis_at(frame: FrameAtPoint, sp: StructureProfile) -> PairTensor:
    """Torsion of J^q with the orientation under which the (X_j, xi^s)
    component equals (lambda_R(X_j)/q^2)(1 - q^2 - q') along zeta^s."""
    if frame.chart != "full":
        raise FrameError("the Nijenhuis check runs on full-W frames")
    roots, split, w = frame.roots, frame.split, frame.w
    co = realize(sp, roots, w)
    jfields = [_structure_field(frame, sp, f) for f in frame.fields]

    def at(i, j):
        A, B = frame.fields[i], frame.fields[j]
        JA, JB = jfields[i], jfields[j]
        b_ab, h1 = field_bracket(A, B, w, split)
        b_jajb, h2 = field_bracket(JA, JB, w, split)
        b_jab, h3 = field_bracket(JA, B, w, split)
        b_ajb, h4 = field_bracket(A, JB, w, split)

        def J(tv):
            return _apply_complex(split, co.q_lam, tv, "full", w)

        standard = J(J(b_ab)) + b_jajb - J(b_jab) - J(b_ajb)
        return standard * (-1.0), max(h1, h2, h3, h4)

    return _pair_tensor(frame, sp, at)


def normality_tensor_at(frame: FrameAtPoint, sp: StructureProfile) -> PairTensor:
    """N(A,B) = [phi,phi](A,B) + 2 dEta(A,B) xi on sphere frames."""
    if frame.chart != "sphere":
        raise FrameError("the normality check runs on sphere frames")
    roots, split, w = frame.roots, frame.split, frame.w
    co = realize(sp, roots, w)
    pfields = [_structure_field(frame, sp, f) for f in frame.fields]
    deta = deta_at(frame, sp)
    xi_val = xi_field(roots, frame.radius, co.a0).value(w)

    def at(i, j):
        A, B = frame.fields[i], frame.fields[j]
        PA, PB = pfields[i], pfields[j]
        b_ab, h1 = field_bracket(A, B, w, split)
        b_papb, h2 = field_bracket(PA, PB, w, split)
        b_pab, h3 = field_bracket(PA, B, w, split)
        b_apb, h4 = field_bracket(A, PB, w, split)

        def phi(tv):
            return _apply_complex(split, co.q_lam, tv, "sphere", w)

        nij = phi(phi(b_ab)) + b_papb - phi(b_pab) - phi(b_apb)
        return nij + xi_val * (2.0 * deta[i, j]), max(h1, h2, h3, h4)

    return _pair_tensor(frame, sp, at)


def h_tensor(frame: FrameAtPoint, sp: StructureProfile) -> np.ndarray:
    """h = (1/2) L_xi phi as a frame matrix: (L_xi phi)A = [xi, phiA] - phi[xi, A]."""
    if frame.chart != "sphere":
        raise FrameError("the h-tensor lives on sphere frames")
    roots, split, w = frame.roots, frame.split, frame.w
    co = realize(sp, roots, w)
    xi = xi_field(roots, frame.radius, co.a0)
    cols = []
    for f in frame.fields:
        phi_f = _structure_field(frame, sp, f)
        t1, _ = field_bracket(xi, phi_f, w, split)
        t2, _ = field_bracket(xi, f, w, split)
        cols.append(frame.expand(t1 - _apply_complex(split, co.q_lam, t2, "sphere", w)))
    return 0.5 * np.array(cols).T


@dataclass(frozen=True)
class KoszulResult:
    gamma: np.ndarray  # gamma[:, i, j] = frame coefficients of nabla_{F_i} F_j
    nabla_xi: np.ndarray  # columns: nabla_{F_i} xi in frame coordinates
    phi_identity_residual: float  # max norm of nabla_X xi + phi X + phi h X


def koszul_at(frame: FrameAtPoint, sp: StructureProfile) -> KoszulResult:
    """Levi-Civita connection on the mbar frame via the constant-coefficient
    Koszul formula; rank one only (coefficients are constant on G/H)."""
    if frame.chart != "sphere" or frame.roots.rank != 1:
        raise FrameError("the Koszul table supports rank-one sphere frames only")
    roots, split, w = frame.roots, frame.split, frame.w
    alg = roots.pair.algebra
    co = realize(sp, roots, w)
    vals = frame.values()
    n = frame.dim

    def g(t1, t2):
        return metric_value(split, co, t1, t2)

    def br(t1, t2):
        return TangentValue(
            split.mbar_project(alg.bracket(t1.mbar, t2.mbar)), np.zeros(roots.rank)
        )

    gmat = np.array([[g(vals[i], vals[j]) for j in range(n)] for i in range(n)])
    gamma = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            rhs = np.array(
                [
                    g(br(vals[i], vals[j]), vals[z])
                    + g(br(vals[z], vals[i]), vals[j])
                    + g(br(vals[z], vals[j]), vals[i])
                    for z in range(n)
                ]
            )
            gamma[:, i, j] = np.linalg.solve(gmat, 0.5 * rhs)

    xi_coeff = frame.expand(xi_field(roots, frame.radius, co.a0).value(w))
    nabla_xi = np.einsum("zij,j->zi", gamma, xi_coeff)

    phi_mat = np.array(
        [
            frame.expand(_apply_complex(split, co.q_lam, v, "sphere", w))
            for v in vals
        ]
    ).T
    h_mat = h_tensor(frame, sp)
    target = -(phi_mat + phi_mat @ h_mat)
    residual = float(np.max(np.abs(nabla_xi - target)))
    return KoszulResult(gamma, nabla_xi, residual)


def induced_standard_metric(roots: RestrictedRootData, radius: float) -> dict:
    """Coefficients of the induced Sasaki metric on a rank-one sphere:
    1 on m, lambda_R(w)^2 on each k_lambda at w = rX."""
    if roots.rank != 1:
        raise FrameError("induced metric coefficients are stated for rank one")
    w = np.array([radius])
    co = realize(
        StructureProfile(
            q=standard_profile().q, a0_recipe="const", alambda_recipe="ak", kappa=1.0
        ),
        roots,
        w,
    )
    out = {"a0": co.a0, "m": [float(a) for a in co.a_lam]}
    out["k"] = [float(b) for b in co.b_lam]
    return out


def ad_h_equivariance_residual(
    frame: FrameAtPoint, sp: StructureProfile, seed: int = 0
) -> float:
    """Max commutator norm of the g and J/phi matrices with a sampled
    Ad_h frame action, h = exp of a centralizer element."""
    from .algebra import exp_matrix
    from .symspace import adjoint_action

    roots = frame.roots
    if roots.dim_h == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    h_elt = roots.centralizer_basis.T @ rng.standard_normal(roots.dim_h)
    k = exp_matrix(roots.pair.algebra, h_elt)
    cols = []
    for v in frame.values():
        image = TangentValue(adjoint_action(roots.pair, k, v.mbar), v.a)
        cols.append(frame.expand(image))
    ad_mat = np.array(cols).T
    pack = structure_at(frame, sp)
    r1 = np.max(np.abs(ad_mat.T @ pack.g @ ad_mat - pack.g))
    r2 = np.max(np.abs(ad_mat @ pack.J_or_phi - pack.J_or_phi @ ad_mat))
    return float(max(r1, r2))
