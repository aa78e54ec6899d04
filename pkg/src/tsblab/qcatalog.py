"""Catalog of scalar deformation functions q and coefficient recipes.

A ScalarProfile is a sum of closed-form terms (linear, tanh, sinh,
log(1+t), exp(t)-1, coth, constant) with analytic values and derivatives,
so the Riccati residual and the t -> 0+ limit of q(t)/t can be certified
rather than sampled.  A StructureProfile bundles q with the recipes that
produce the metric coefficients a0, a_lambda, b_lambda at a chamber point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_KIND_ALIASES = {
    "id": "id",
    "lin": "id",
    "identity": "id",
    "tanh": "tanh",
    "sinh": "sinh",
    "ln": "ln",
    "log": "ln",
    "exp": "exp",
    "expm1": "exp",
    "coth": "coth",
    "const": "const",
}


class ProfileError(ValueError):
    """Malformed profile literal or evaluation outside the domain."""


@dataclass(frozen=True)
class ProfileTerm:
    kind: str
    c: float = 1.0  # inner frequency (or the constant itself for id/const)
    weight: float = 1.0

    def value(self, t: float) -> float:
        k, c = self.kind, self.c
        if k == "id":
            v = c * t
        elif k == "tanh":
            v = np.tanh(c * t)
        elif k == "sinh":
            v = np.sinh(c * t)
        elif k == "ln":
            v = np.log1p(c * t)
        elif k == "exp":
            v = np.expm1(c * t)
        elif k == "coth":
            v = 1.0 / np.tanh(c * t)
        else:  # const
            v = c
        return self.weight * float(v)

    def derivative(self, t: float) -> float:
        k, c = self.kind, self.c
        if k == "id":
            d = c
        elif k == "tanh":
            d = c / np.cosh(c * t) ** 2
        elif k == "sinh":
            d = c * np.cosh(c * t)
        elif k == "ln":
            d = c / (1.0 + c * t)
        elif k == "exp":
            d = c * np.exp(c * t)
        elif k == "coth":
            d = -c / np.sinh(c * t) ** 2
        else:  # const
            d = 0.0
        return self.weight * float(d)


@dataclass(frozen=True)
class ScalarProfile:
    terms: tuple[ProfileTerm, ...]

    def value(self, t: float) -> float:
        if t <= 0:
            raise ProfileError(f"profiles are evaluated at t > 0, got {t}")
        return sum(term.value(t) for term in self.terms)

    def derivative(self, t: float) -> float:
        if t <= 0:
            raise ProfileError(f"profiles are evaluated at t > 0, got {t}")
        return sum(term.derivative(t) for term in self.terms)

    def literal(self) -> str:
        parts = []
        for term in self.terms:
            c = term.c * term.weight if term.kind in ("id", "const") else term.c
            parts.append(f"{term.kind}:{c:g}")
        return "+".join(parts)


def parse_profile(text: str) -> ScalarProfile:
    """Parse a profile literal such as "tanh:1.0" or "sinh:2.0+lin:0.5"."""
    terms = []
    for chunk in text.split("+"):
        chunk = chunk.strip()
        if not chunk:
            raise ProfileError(f"empty term in profile literal {text!r}")
        kind, _, param = chunk.partition(":")
        kind = kind.strip().lower()
        if kind not in _KIND_ALIASES:
            raise ProfileError(
                f"unknown profile kind {kind!r}; expected one of "
                f"{sorted(set(_KIND_ALIASES))}"
            )
        try:
            c = float(param) if param else 1.0
        except ValueError as err:
            raise ProfileError(f"bad parameter in term {chunk!r}") from err
        if c <= 0:
            raise ProfileError(f"profile parameters must be positive: {chunk!r}")
        terms.append(ProfileTerm(_KIND_ALIASES[kind], c))
    return ScalarProfile(tuple(terms))


def eval_profile(p: ScalarProfile, t: float, mode: str = "value") -> float:
    if mode == "value":
        return p.value(t)
    if mode == "derivative":
        return p.derivative(t)
    raise ProfileError(f"mode must be value or derivative, got {mode!r}")


@dataclass(frozen=True)
class LimitClass:
    tag: str  # "finite-positive" | "infinite" | "zero"
    value: float | None = None


def limit_class(p: ScalarProfile, cross_check: bool = True) -> LimitClass:
    """Classification of lim_{t->0+} q(t)/t, analytic with numeric cross-check."""
    total = 0.0
    infinite = False
    for term in p.terms:
        if term.kind in ("coth", "const"):
            infinite = True
        else:
            # id, tanh, sinh, ln, exp all behave like c*t near zero
            total += term.weight * term.c
    if infinite:
        result = LimitClass("infinite")
    elif total == 0.0:
        result = LimitClass("zero", 0.0)
    else:
        result = LimitClass("finite-positive", total)

    if cross_check:
        samples = [p.value(10.0**-k) / 10.0**-k for k in range(3, 7)]
        if result.tag == "finite-positive":
            rel = abs(samples[-1] - result.value) / abs(result.value)
            if rel > 1e-4:
                raise ProfileError(
                    f"numeric limit {samples[-1]:.8g} disagrees with analytic "
                    f"{result.value:.8g} (relative error {rel:.2e})"
                )
        elif result.tag == "infinite":
            if not (samples[-1] > samples[0] and samples[-1] > 1e2):
                raise ProfileError("numeric samples do not diverge as classified")
    return result


def riccati_residual(p: ScalarProfile, t: float) -> float:
    """1 - q(t)^2 - q'(t), zero exactly for the tanh and coth solutions."""
    return 1.0 - p.value(t) ** 2 - p.derivative(t)


# ---------------------------------------------------------------------------
# coefficient recipes


@dataclass(frozen=True)
class StructureProfile:
    """q plus the recipes producing a0 and a_lambda.

    a0_recipe: "const" (value kappa) or "contact" (1/(2r)).
    alambda_recipe: "contact" -> a0 lambda_R(w) / (2 r q_lambda),
    "ak" -> a0^2 lambda_R(w) / q_lambda, or "explicit" constants per root.
    """

    q: ScalarProfile
    a0_recipe: str = "const"
    alambda_recipe: str = "ak"
    kappa: float = 1.0
    radius: float | None = None
    explicit_alambda: tuple[float, ...] | None = None
    # overrides q root by root (e.g. distinct constants per root)
    q_per_root: tuple[ScalarProfile, ...] | None = None
    # negative-control hook: multiply a_lambda[index] by factor
    perturbation: tuple[int, float] | None = None

    def describe(self) -> dict:
        out = {
            "q": self.q.literal()
            if self.q_per_root is None
            else [p.literal() for p in self.q_per_root],
            "a0": self.a0_recipe,
            "alambda": self.alambda_recipe,
            "kappa": self.kappa,
        }
        if self.radius is not None:
            out["radius"] = self.radius
        if self.explicit_alambda is not None:
            out["explicit_alambda"] = list(self.explicit_alambda)
        if self.perturbation is not None:
            out["perturbation"] = list(self.perturbation)
        return out


@dataclass(frozen=True)
class Coefficients:
    a0: float
    q_lam: np.ndarray  # per positive root
    dq_lam: np.ndarray  # q' at the same arguments
    a_lam: np.ndarray
    b_lam: np.ndarray


def parse_a0_recipe(text: str) -> tuple[str, float]:
    """Returns (recipe, kappa); accepts "contact" or "const:<kappa>"."""
    text = text.strip().lower()
    if text == "contact":
        return "contact", 1.0
    if text.startswith("const"):
        _, _, param = text.partition(":")
        kappa = float(param) if param else 1.0
        if kappa <= 0:
            raise ProfileError("kappa must be positive")
        return "const", kappa
    raise ProfileError(f"unknown a0 recipe {text!r}; expected contact or const:<k>")


def parse_alambda_recipe(text: str) -> tuple[str, tuple[float, ...] | None]:
    text = text.strip().lower()
    if text in ("ak", "contact"):
        return text, None
    if text.startswith("explicit"):
        _, _, param = text.partition(":")
        if not param:
            raise ProfileError("explicit recipe needs values, e.g. explicit:1")
        values = tuple(float(v) for v in param.split(","))
        if any(v <= 0 for v in values):
            raise ProfileError("explicit a_lambda values must be positive")
        return "explicit", values
    raise ProfileError(
        f"unknown a_lambda recipe {text!r}; expected ak, contact or explicit:<v,..>"
    )


def realize(
    sp: StructureProfile, roots, w: np.ndarray, allow_wall: bool = False
) -> Coefficients:
    """Coefficient set {a0, q_lambda, a_lambda, b_lambda} at a chamber point."""
    w = np.asarray(w, dtype=float)
    lam_w = roots.lambda_values(w)
    if not allow_wall and np.any(lam_w <= 0):
        raise ProfileError("point lies on a chamber wall or outside the chamber")

    r = sp.radius
    if sp.a0_recipe == "contact":
        if r is None:
            raise ProfileError("contact a0 recipe needs a radius")
        a0 = 1.0 / (2.0 * r)
    elif sp.a0_recipe == "const":
        a0 = sp.kappa
    else:
        raise ProfileError(f"unknown a0 recipe {sp.a0_recipe!r}")

    if sp.q_per_root is not None and len(sp.q_per_root) != len(lam_w):
        raise ProfileError(
            f"got {len(sp.q_per_root)} per-root profiles for {len(lam_w)} roots"
        )
    profiles = sp.q_per_root if sp.q_per_root is not None else [sp.q] * len(lam_w)
    q_lam = np.array(
        [p.value(t) if t > 0 else np.nan for p, t in zip(profiles, lam_w)]
    )
    dq_lam = np.array(
        [p.derivative(t) if t > 0 else np.nan for p, t in zip(profiles, lam_w)]
    )

    n_roots = len(lam_w)
    if sp.alambda_recipe == "contact":
        if r is None:
            raise ProfileError("contact a_lambda recipe needs a radius")
        a_lam = a0 * lam_w / (2.0 * r * q_lam)
    elif sp.alambda_recipe == "ak":
        a_lam = a0 * a0 * lam_w / q_lam
    elif sp.alambda_recipe == "explicit":
        values = sp.explicit_alambda
        if values is None:
            raise ProfileError("explicit recipe without values")
        if len(values) == 1:
            a_lam = np.full(n_roots, values[0])
        elif len(values) == n_roots:
            a_lam = np.array(values)
        else:
            raise ProfileError(
                f"got {len(values)} explicit values for {n_roots} roots"
            )
    else:
        raise ProfileError(f"unknown a_lambda recipe {sp.alambda_recipe!r}")

    if sp.perturbation is not None:
        index, factor = sp.perturbation
        a_lam = a_lam.copy()
        a_lam[index] *= factor

    b_lam = a_lam * q_lam * q_lam
    if not allow_wall and (
        a0 <= 0 or np.any(~np.isfinite(a_lam)) or np.any(a_lam <= 0)
    ):
        raise ProfileError("realized coefficients are not all positive")
    return Coefficients(a0, q_lam, dq_lam, a_lam, b_lam)


def standard_profile() -> StructureProfile:
    """q = id, a0 = 1, a_lambda = 1: the Sasaki / standard structure."""
    return StructureProfile(
        q=parse_profile("id:1"),
        a0_recipe="const",
        alambda_recipe="explicit",
        kappa=1.0,
        explicit_alambda=(1.0,),
    )
