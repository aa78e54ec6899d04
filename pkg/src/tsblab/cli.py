"""Command-line driver: catalog inspection, decompositions, theorem checks.

Exit codes: 0 when every verdict is "pass" or "expected-fail-confirmed",
1 when any check reports "fail", 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import verify as vf
from .qcatalog import (
    ProfileError,
    StructureProfile,
    parse_a0_recipe,
    parse_alambda_recipe,
    parse_profile,
)
from .symspace import (
    DecompositionError,
    decompose_space,
    roots_from_json,
    roots_to_json,
)

THEOREMS = ("contact", "killing", "rank1", "almost-kahler", "normality", "tables")

CONFIG_KEYS = {
    "space",
    "theorem",
    "q",
    "a0",
    "alambda",
    "radius",
    "kappa",
    "tol",
    "seed",
    "samples",
    "cache_dir",
    "out",
}


class UsageError(Exception):
    pass


def load_config(path: str) -> dict:
    """key=value lines, '#' comments; unknown keys rejected with location."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in CONFIG_KEYS:
            raise UsageError(
                f"{path}:{lineno}: unknown key {key!r}; allowed: "
                f"{', '.join(sorted(CONFIG_KEYS))}"
            )
        out[key] = value
    return out


def cache_dir_from(args) -> Path:
    if args.cache_dir:
        return Path(args.cache_dir)
    env = os.environ.get("TSBLAB_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "tsblab"


def cached_decomposition(space_tag: str, cache: Path):
    name, n = vf.parse_space_id(space_tag)
    path = cache / f"decomp_{name}{n}.json"
    if path.exists():
        return roots_from_json(path.read_text())
    roots = decompose_space(name, n)
    cache.mkdir(parents=True, exist_ok=True)
    path.write_text(roots_to_json(roots))
    return roots


def build_profile(args) -> StructureProfile:
    q = parse_profile(args.q)
    a0_recipe, kappa = parse_a0_recipe(args.a0)
    if args.kappa is not None:
        kappa = args.kappa
    alambda_recipe, explicit = parse_alambda_recipe(args.alambda)
    return StructureProfile(
        q=q,
        a0_recipe=a0_recipe,
        alambda_recipe=alambda_recipe,
        kappa=kappa,
        radius=args.radius,
        explicit_alambda=explicit,
    )


def cmd_catalog(args) -> int:
    rows = []
    for tag in ["sphere2", "sphere3", "sphere4", "sphere5", "sphere6",
                "rp2", "rp3", "cp2", "cp3", "cp4", "hp1", "hp2", "hp3",
                "su_so3", "su_so4"]:
        name, n = vf.parse_space_id(tag)
        roots = decompose_space(name, n)
        lam = [(float(rs.lambda_R[0]), rs.multiplicity) for rs in roots.positive_roots]
        if roots.rank == 1:
            top = max(v for v, _ in lam)
            m_eps = sum(m for v, m in lam if abs(v - top) < 1e-8)
            m_half = sum(m for v, m in lam if abs(v - top / 2) < 1e-8)
            desc = f"m_eps={m_eps} m_eps/2={m_half}"
        else:
            desc = f"{len(roots.positive_roots)} positive roots"
        rows.append(
            (tag, roots.rank, roots.pair.dim_m, roots.dim_h, desc)
        )
    print(f"{'space':<10}{'rank':<6}{'dim m':<7}{'dim h':<7}roots")
    for row in rows:
        print(f"{row[0]:<10}{row[1]:<6}{row[2]:<7}{row[3]:<7}{row[4]}")
    return 0


def cmd_decompose(args) -> int:
    roots = cached_decomposition(args.space, cache_dir_from(args))
    text = roots_to_json(roots)
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text)
    return 0


def run_check(args) -> vf.VerificationReport:
    theorem = args.theorem
    if theorem == "tables":
        return vf.check_catalog_tables(seed=args.seed)
    sp = build_profile(args)
    if theorem == "contact":
        return vf.check_contact(
            args.space, sp, args.radius, args.samples, args.seed,
            tol=args.tol if args.tol else vf.CONTACT_TOL,
        )
    if theorem == "killing":
        return vf.check_killing(
            args.space, sp, args.radius, args.samples, args.seed,
            tol=args.tol if args.tol else 1e-9,
        )
    if theorem == "rank1":
        q_values = tuple(float(v) for v in args.q_values.split(","))
        return vf.check_rank1_classification(
            args.space, args.kappa if args.kappa else 1.0, q_values,
            args.radius, args.seed,
        )
    if theorem == "almost-kahler":
        return vf.check_almost_kahler(
            args.space, parse_profile(args.q),
            a0=args.kappa if args.kappa else 1.0,
            radius=args.radius, seed=args.seed,
        )
    if theorem == "normality":
        return vf.check_normality(
            args.space, sp, args.radius, args.samples, args.seed,
            tol=args.tol if args.tol else vf.PASS_TOL,
        )
    raise UsageError(f"unknown theorem {theorem!r}")


def cmd_check(args) -> int:
    if args.theorem != "tables" and not args.space:
        raise UsageError("check needs --space for this theorem")
    report = run_check(args)
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return 0 if report.verdict in ("pass", "expected-fail-confirmed") else 1


def full_suite(seed: int) -> list:
    """(job_id, thunk) pairs covering the acceptance criteria."""

    def contact_profile(qlit, r):
        return StructureProfile(
            q=parse_profile(qlit), a0_recipe="contact",
            alambda_recipe="contact", radius=r,
        )

    def standard_profile_sp():
        return StructureProfile(
            q=parse_profile("id:1"), a0_recipe="const",
            alambda_recipe="ak", kappa=1.0,
        )

    jobs = []
    jobs.append(("tables", lambda: vf.check_catalog_tables(seed=seed)))

    for tag in ["sphere3", "cp2", "hp1", "su_so3"]:
        for qlit in ["id:1", "tanh:1", "sinh:1", "ln:1"]:
            for r in [0.5, 1.0, 2.0]:
                jobs.append(
                    (
                        f"contact:{tag}:{qlit}:r{r}",
                        lambda tag=tag, qlit=qlit, r=r: vf.check_contact(
                            tag, contact_profile(qlit, r), r, seed=seed
                        ),
                    )
                )
    # Tashiro: standard structure contact only at r = 1/2; rectified always
    for r in [0.5, 1.0, 2.0]:
        jobs.append(
            (
                f"tashiro-standard:sphere3:r{r}",
                lambda r=r: vf.check_contact(
                    "sphere3", standard_profile_sp(), r, seed=seed
                ),
            )
        )
        jobs.append(
            (
                f"tashiro-rectified:sphere3:r{r}",
                lambda r=r: vf.check_contact(
                    "sphere3", contact_profile("id:1", r), r, seed=seed
                ),
            )
        )

    for tag, r in [
        ("sphere3", 1.0), ("sphere3", 0.5), ("sphere3", 2.0),
        ("sphere4", 1.0), ("cp2", 0.5), ("cp2", 1.0), ("cp2", 2.0),
    ]:
        jobs.append(
            (
                f"killing-standard:{tag}:r{r}",
                lambda tag=tag, r=r: vf.check_killing(
                    tag, standard_profile_sp(), r, seed=seed
                ),
            )
        )
    jobs.append(
        (
            "killing:su_so3:r1.0",
            lambda: vf.check_killing(
                "su_so3", contact_profile("tanh:1", 1.0), 1.0, seed=seed
            ),
        )
    )

    for tag, kappa, qv in [
        ("cp2", 1.0, 1.0), ("sphere3", 2.0, 3.0), ("hp1", 1.0, 1.0),
    ]:
        jobs.append(
            (
                f"rank1:{tag}:k{kappa}:q{qv}",
                lambda tag=tag, kappa=kappa, qv=qv: vf.check_rank1_classification(
                    tag, kappa, (qv,), seed=seed
                ),
            )
        )

    for qlit in ["tanh:1", "id:1", "sinh:1", "coth"]:
        jobs.append(
            (
                f"almost-kahler:su_so3:{qlit}",
                lambda qlit=qlit: vf.check_almost_kahler(
                    "su_so3", parse_profile(qlit), seed=seed
                ),
            )
        )
    jobs.append(
        (
            "almost-kahler:sphere3:tanh:1",
            lambda: vf.check_almost_kahler(
                "sphere3", parse_profile("tanh:1"), seed=seed
            ),
        )
    )

    for tag in ["sphere3", "cp2", "hp1", "su_so3"]:
        for qv in [1.0, 2.0]:
            for r in [0.5, 1.0]:
                jobs.append(
                    (
                        f"normality:{tag}:q{qv}:r{r}",
                        lambda tag=tag, qv=qv, r=r: vf.check_normality(
                            tag,
                            StructureProfile(
                                q=parse_profile(f"const:{qv}"),
                                a0_recipe="contact",
                                alambda_recipe="contact",
                                radius=r,
                            ),
                            r,
                            seed=seed,
                        ),
                    )
                )
    return jobs


def cmd_report(args) -> int:
    if not args.all:
        raise UsageError("report currently supports only --all")
    jobs = full_suite(args.seed)
    # warm the decomposition cache serially, then fan out
    for tag in ["sphere2", "sphere3", "sphere4", "sphere5", "sphere6",
                "cp2", "cp3", "cp4", "hp1", "hp2", "hp3", "su_so3"]:
        name, n = vf.parse_space_id(tag)
        decompose_space(name, n)
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        futures = [(job_id, pool.submit(thunk)) for job_id, thunk in jobs]
        results = [(job_id, f.result()) for job_id, f in futures]
    results.sort(key=lambda kv: kv[0])

    ok = sum(1 for _, r in results if r.verdict == "pass")
    confirmed = sum(
        1 for _, r in results if r.verdict == "expected-fail-confirmed"
    )
    failed = [(job_id, r) for job_id, r in results if r.verdict == "fail"]
    payload = {
        "schema": 1,
        "seed": args.seed,
        "reports": {job_id: r.to_dict() for job_id, r in results},
        "summary": {
            "total": len(results),
            "pass": ok,
            "expected_fail_confirmed": confirmed,
            "fail": len(failed),
        },
    }
    text = json.dumps(payload, indent=1, sort_keys=True)

    table_lines = [f"{'job':<42}{'verdict':<26}max residual"]
    for job_id, r in results:
        worst = max(r.residuals.values()) if r.residuals else 0.0
        table_lines.append(f"{job_id:<42}{r.verdict:<26}{worst:.3e}")
    table_lines.append(
        f"total {len(results)}  pass {ok}  expected-fail {confirmed}  "
        f"fail {len(failed)}"
    )
    table = "\n".join(table_lines)

    if args.out:
        Path(args.out).write_text(text)
        print(table)
    else:
        print(text)
        print(table, file=sys.stderr)
    return 0 if not failed else 1


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsblab",
        description="Invariant contact and Hermitian structures on tangent "
        "sphere bundles of compact symmetric spaces: numerical checks.",
    )
    parser.add_argument("--config", help="key=value config file (flags win)")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("catalog", help="list catalog spaces and root data")

    p = sub.add_parser("decompose", help="emit a restricted-root decomposition")
    p.add_argument("--space", required=True)
    p.add_argument("--out")
    p.add_argument("--cache-dir")

    p = sub.add_parser("check", help="run a single theorem check")
    p.add_argument("--theorem", required=True, choices=THEOREMS)
    p.add_argument("--space", default="")
    p.add_argument("--q", default="tanh:1.0", help='profile literal, e.g. "tanh:1.0"')
    p.add_argument("--a0", default="contact", help='"contact" or "const:<kappa>"')
    p.add_argument(
        "--alambda", default="contact", help='"contact", "ak" or "explicit:<v,..>"'
    )
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--q-values", default="1.0", help="rank1: per-root q constants")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--cache-dir")

    p = sub.add_parser("report", help="run the full acceptance suite")
    p.add_argument("--all", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=4)
    p.add_argument("--cache-dir")
    return parser


def _find_config(argv):
    for i, tok in enumerate(argv):
        if tok == "--config":
            if i + 1 >= len(argv):
                raise UsageError("--config needs a file path")
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.partition("=")[2]
    return None


def _merge_config(parser, argv):
    """Locate --config before parsing so config values can fill in
    otherwise-required flags; explicit flags still win."""
    path = _find_config(argv)
    if not path:
        return parser.parse_args(argv)
    cfg = load_config(path)
    flag_map = {
        "space": "--space", "theorem": "--theorem", "q": "--q", "a0": "--a0",
        "alambda": "--alambda", "radius": "--radius", "kappa": "--kappa",
        "tol": "--tol", "seed": "--seed", "samples": "--samples",
        "cache_dir": "--cache-dir", "out": "--out",
    }
    extra = []
    for key, value in cfg.items():
        flag = flag_map[key]
        if flag not in argv:
            extra.extend([flag, value])
    return parser.parse_args(argv + extra)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = make_parser()
    try:
        args = _merge_config(parser, argv)
    except SystemExit as err:
        return 2 if err.code not in (0, None) else 0
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    try:
        if args.command == "catalog":
            return cmd_catalog(args)
        if args.command == "decompose":
            return cmd_decompose(args)
        if args.command == "check":
            return cmd_check(args)
        if args.command == "report":
            return cmd_report(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (ProfileError, DecompositionError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    print("error: no command", file=sys.stderr)
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
