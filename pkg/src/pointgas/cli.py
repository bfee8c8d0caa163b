"""Command-line front end.

Subcommands: laplace, verify, study, sample, fugacity, rhoc.  Options can
come from a JSON config file (--config) with individual flags overriding
it.  Data goes to stdout (or --out), diagnostics to stderr.  Exit codes:
0 success, 2 parameter-domain errors, 1 internal failure.  Floats are
printed with 17 significant digits.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import fredholm, kernels, processes, sampler, symgroup, thermo
from .alphadet import alpha_det, permanent_ryser, power_sum_alpha_sum
from .errors import DomainError, PointGasError


@dataclass
class RunConfig:
    """Validated bag of run options (JSON config keys must match fields)."""

    command: str = ""
    kind: str = "fermion"
    alpha: float | None = None
    d: int = 1
    beta: float = 1.0
    rho: float = 0.2
    a: float = 1.0
    L: float = 20.0
    N: int | None = None
    L_list: tuple[float, ...] = (10.0, 20.0, 40.0)
    f_scale: float = 0.5
    f_width: float = 2.0
    f_csv: str | None = None
    limit: bool = False
    suite: str = "all"
    steps: int = 20_000
    burn_in: int = 10_000
    thinning: int = 10
    seed: int = 1
    tol: float = 1e-12
    out: str | None = None

    @classmethod
    def field_names(cls):
        return {f.name for f in fields(cls)}

    def apply(self, mapping: dict) -> "RunConfig":
        unknown = set(mapping) - self.field_names()
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        for key, value in mapping.items():
            if value is None:
                continue
            if key == "L_list":
                value = tuple(float(x) for x in value)
            setattr(self, key, value)
        return self


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        if np.isnan(x):
            return "NaN"
        if np.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return format(float(x), ".17g")
    return json.dumps(x)


def _json_object(pairs: dict) -> str:
    items = ", ".join(f'"{k}": {_fmt(v)}' for k, v in pairs.items())
    return "{" + items + "}"


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _test_function(cfg: RunConfig):
    if cfg.f_csv:
        return kernels.load_test_function_csv(cfg.f_csv)
    return kernels.BumpFunction(cfg.f_scale, cfg.f_width)


def _ensemble(cfg: RunConfig) -> processes.EnsembleSpec:
    return processes.EnsembleSpec(kind=cfg.kind, d=cfg.d, beta=cfg.beta, a=cfg.a, rho=cfg.rho)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_laplace(cfg: RunConfig) -> int:
    f = _test_function(cfg)
    if cfg.limit:
        result = processes.limit_laplace(f, _ensemble(cfg))
    else:
        n = cfg.N if cfg.N is not None else max(1, round(cfg.rho * cfg.L**cfg.d))
        result = processes.finite_laplace(f, cfg.L, n, cfg.kind, beta=cfg.beta, a=cfg.a)
    _emit(_json_object({"value": result.value, "method": result.method,
                        "error_estimate": result.error_estimate}), cfg.out)
    return 0


def cmd_fugacity(cfg: RunConfig) -> int:
    alpha = cfg.alpha if cfg.alpha is not None else processes.kind_alpha(cfg.kind)
    sol = thermo.solve_fugacity(rho=cfg.rho, alpha=alpha, d=cfg.d, beta=cfg.beta, tol=cfg.tol)
    _emit(_json_object({"z": sol.z, "rho_hat": sol.rho_hat, "residual": sol.residual,
                        "iterations": sol.iterations, "alpha": alpha}), cfg.out)
    return 0


def cmd_rhoc(cfg: RunConfig) -> int:
    value = thermo.rho_c(cfg.beta, cfg.d)
    divergent = not np.isfinite(value)
    _emit(_json_object({"rho_c": None if divergent else value, "divergent": divergent,
                        "beta": cfg.beta, "d": cfg.d}), cfg.out)
    return 0


def cmd_sample(cfg: RunConfig) -> int:
    n = cfg.N if cfg.N is not None else 2
    samples, stats = sampler.mcmc_sample(cfg.kind, cfg.L, n, cfg.steps, cfg.seed,
                                         beta=cfg.beta, burn_in=cfg.burn_in,
                                         thinning=cfg.thinning)
    summary = _json_object({
        "kind": cfg.kind, "L": cfg.L, "N": n, "steps": stats.steps,
        "acceptance_rate": stats.acceptance_rate,
        "autocorrelation_time": stats.autocorrelation_time,
        "n_samples": samples.shape[0], "seed": cfg.seed,
    })
    csv_text = sampler.samples_to_csv(samples)
    if cfg.out:
        _emit(csv_text, cfg.out)
        sys.stdout.write(summary + "\n")
    else:
        sys.stdout.write(csv_text)
        sys.stderr.write(summary + "\n")
    return 0


def cmd_study(cfg: RunConfig) -> int:
    f = _test_function(cfg)
    if cfg.suite in ("all", "convergence"):
        table = processes.convergence_study(f, _ensemble(cfg), cfg.L_list)
        _emit(table.to_csv(), cfg.out)
        return 0
    if cfg.suite == "saddle":
        branch = "fermion" if "fermion" in cfg.kind else "boson"
        lines = ["N,value,abs_err"]
        for n in (100, 1000, 10000):
            if branch == "fermion":
                fam = fredholm.PFamily.geometric(n, s=1.0, q=0.9)
            else:
                fam = fredholm.PFamily.capped_geometric(n, s=1.0)
            value = fredholm.saddle_limit_check(fam, branch)
            lines.append(f"{n},{value:.17g},{abs(value - 1.0):.17g}")
        _emit("\n".join(lines), cfg.out)
        return 0
    if cfg.suite == "sample":
        return cmd_sample(cfg)
    raise DomainError(f"unknown study suite {cfg.suite!r}")


# ---------------------------------------------------------------------------
# Verification suites
# ---------------------------------------------------------------------------


def _verify_vere_jones() -> list[tuple[str, bool, str]]:
    rng = np.random.default_rng(20240601)
    checks = []
    worst_pf = worst_cc = 0.0
    for _ in range(6):
        m = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        j = m @ m.conj().T
        g = np.linalg.eigvalsh(j)
        for alpha in (-1.0, -0.5, 0.5, 1.0):
            z = 0.9 / (abs(alpha) * g[-1])
            series = fredholm.vere_jones_partial_sum(g, alpha, z, 400).value
            product = fredholm.fredholm_det_power(g, alpha, z).real
            worst_pf = max(worst_pf, abs(product - series) / abs(product))
            radius = 0.5 / (abs(alpha) * g[-1])
            for n in range(1, 6):
                contour = fredholm.coefficient_contour(
                    g, alpha, n, fredholm.ContourSpec(radius))
                direct = power_sum_alpha_sum(g, alpha, n).real
                worst_cc = max(worst_cc, abs(contour - direct) / abs(direct))
    checks.append(("product-vs-series", worst_pf <= 1e-8, f"max rel err {worst_pf:.3e}"))
    checks.append(("contour-vs-coefficients", worst_cc <= 1e-10, f"max rel err {worst_cc:.3e}"))
    a = rng.normal(size=(6, 6))
    a = a @ a.T
    det_gap = abs(alpha_det(a, -1.0) - np.linalg.det(a)) / abs(np.linalg.det(a))
    per_gap = abs(alpha_det(a, 1.0) - permanent_ryser(a)) / abs(permanent_ryser(a))
    checks.append(("alpha-det-cross-checks", max(det_gap, per_gap) <= 1e-10,
                   f"det {det_gap:.3e}, per {per_gap:.3e}"))
    return checks


def _verify_appendix_a() -> list[tuple[str, bool, str]]:
    checks = []
    p_b = np.linspace(0.0, 1.0, 200)[:, None]
    theta = np.linspace(-np.pi, np.pi, 200)[None, :]
    worst = 0.0
    for chk in fredholm.lemma_a1_check(p_b, theta, "boson"):
        worst = min(float(np.min(chk.slack)), worst)
    p_f = np.linspace(0.0, 4.0, 200)[:, None]
    for chk in fredholm.lemma_a1_check(p_f, theta, "fermion"):
        worst = min(float(np.min(chk.slack)), worst)
    checks.append(("lemma-a1-slacks", worst >= -1e-12, f"min slack {worst:.3e}"))
    errs = []
    for n in (100, 1000, 10000):
        fam = fredholm.PFamily.geometric(n, s=1.0, q=0.9)
        errs.append(abs(fredholm.saddle_limit_check(fam, "fermion") - 1.0))
    ok_f = errs[0] > errs[1] > errs[2] and errs[2] < 0.05
    checks.append(("saddle-fermion-trend", ok_f, f"|value-1|: {errs}"))
    errs = []
    for n in (100, 1000, 10000):
        fam = fredholm.PFamily.capped_geometric(n, s=1.0)
        errs.append(abs(fredholm.saddle_limit_check(fam, "boson") - 1.0))
    ok_b = errs[0] > errs[2] and errs[2] < 0.05
    checks.append(("saddle-boson-trend", ok_b, f"|value-1|: {errs}"))
    return checks


def _verify_characters() -> list[tuple[str, bool, str]]:
    from .alphadet import conjugacy_class_size, partitions
    from math import factorial

    checks = []
    ok = True
    for n in range(2, 7):
        frames = [symgroup.YoungFrame2(n, j) for j in range(n // 2 + 1)]
        for fi in frames:
            for fj in frames:
                total = sum(
                    conjugacy_class_size(parts)
                    * symgroup.chi_character(fi, parts)
                    * symgroup.chi_character(fj, parts)
                    for parts in partitions(n)
                )
                expect = factorial(n) if fi == fj else 0
                ok = ok and total == expect
    checks.append(("orthogonality", ok, "two-row frames, N<=6"))
    ok = True
    for n in range(2, 7):
        for j in range(n // 2 + 1):
            frame = symgroup.YoungFrame2(n, j)
            for parts in partitions(n):
                sgn = -1 if (n - len(parts)) % 2 else 1
                ok = ok and symgroup.chi_character(frame.transpose(), parts) == sgn * symgroup.chi_character(frame, parts)
                ok = ok and symgroup.psi_character(frame.transpose(), parts) == sgn * symgroup.psi_character(frame, parts)
    checks.append(("transpose-relations", ok, "chi' = sgn*chi, phi' = sgn*psi"))
    rng = np.random.default_rng(7)
    worst = 0.0
    for n in range(2, 9):
        spec = rng.uniform(0.05, 1.0, size=4)
        for kind in ("boson2", "fermion2"):
            a = symgroup.para_trace(spec, n, kind, method="factorized")
            b = symgroup.para_trace(spec, n, kind, method="character")
            worst = max(worst, abs(a - b) / abs(a))
    checks.append(("para-trace-dual-paths", worst <= 1e-10, f"max rel err {worst:.3e}"))
    return checks


def _verify_interlacing() -> list[tuple[str, bool, str]]:
    settings = [
        (kernels.BumpFunction(0.5, 2.0), 10.0, 1.0),
        (kernels.BumpFunction(1.0, 2.0), 15.0, 1.0),
        (kernels.BumpFunction(0.5, 4.0), 20.0, 0.5),
        (kernels.BumpFunction(2.0, 1.0), 12.0, 2.0),
        (kernels.BumpFunction(0.2, 3.0), 25.0, 1.5),
    ]
    worst = -np.inf
    for f, L, beta in settings:
        grid = kernels.TorusGrid.for_beta(1, L, beta)
        g = kernels.heat_spectrum(grid, beta).values
        gt = kernels.build_gtilde(grid, beta, f).eigenvalues().values
        worst = max(worst, float(np.max(gt - g)))
    return [("interlacing", worst <= 1e-10, f"max(gt - g) = {worst:.3e}")]


_SUITES = {
    "vere-jones": _verify_vere_jones,
    "appendix-a": _verify_appendix_a,
    "characters": _verify_characters,
    "interlacing": _verify_interlacing,
}


def cmd_verify(cfg: RunConfig) -> int:
    names = list(_SUITES) if cfg.suite == "all" else [cfg.suite]
    unknown = [n for n in names if n not in _SUITES]
    if unknown:
        raise DomainError(f"unknown verify suite {unknown[0]!r}; choose from {list(_SUITES)} or 'all'")
    all_ok = True
    lines = []
    for name in names:
        for check, ok, detail in _SUITES[name]():
            all_ok = all_ok and ok
            lines.append(f"{'PASS' if ok else 'FAIL'}  {name}/{check}  {detail}")
    _emit("\n".join(lines), cfg.out)
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pointgas",
                                     description="Canonical-ensemble point process toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--kind", choices=processes.KINDS)
        p.add_argument("--alpha", type=float)
        p.add_argument("--d", type=int)
        p.add_argument("--beta", type=float)
        p.add_argument("--rho", type=float)
        p.add_argument("--a", type=float, help="composite well half-width")
        p.add_argument("--L", type=float)
        p.add_argument("--N", type=int)
        p.add_argument("--L-list", dest="L_list",
                       help="comma-separated box sizes for studies")
        p.add_argument("--f-scale", dest="f_scale", type=float, help="bump height")
        p.add_argument("--f-width", dest="f_width", type=float, help="bump width")
        p.add_argument("--f-csv", dest="f_csv", help="two-column CSV test function")
        p.add_argument("--steps", type=int)
        p.add_argument("--burn-in", dest="burn_in", type=int)
        p.add_argument("--thinning", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--out", help="write data to this file instead of stdout")

    p = sub.add_parser("laplace", help="Laplace functional, finite or limit")
    add_common(p)
    p.add_argument("--limit", action="store_true", default=None,
                   help="thermodynamic-limit value instead of finite-N")

    p = sub.add_parser("verify", help="run identity-verification suites")
    p.add_argument("suite", nargs="?", default="all",
                   help="vere-jones | appendix-a | characters | interlacing | all")
    add_common(p)

    p = sub.add_parser("study", help="convergence / saddle / sampling studies")
    add_common(p)
    p.add_argument("--suite", default=None,
                   help="convergence (default) | saddle | sample")

    p = sub.add_parser("sample", help="MCMC sampling of the finite ensemble")
    add_common(p)

    p = sub.add_parser("fugacity", help="solve the limit fugacity equation")
    add_common(p)

    p = sub.add_parser("rhoc", help="critical boson density")
    add_common(p)
    return parser


_DISPATCH = {
    "laplace": cmd_laplace,
    "verify": cmd_verify,
    "study": cmd_study,
    "sample": cmd_sample,
    "fugacity": cmd_fugacity,
    "rhoc": cmd_rhoc,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = vars(parser.parse_args(argv))
    command = args.pop("command")
    config_path = args.pop("config", None)
    if args.get("L_list") is not None and isinstance(args["L_list"], str):
        args["L_list"] = tuple(float(x) for x in args["L_list"].split(","))
    cfg = RunConfig(command=command)
    if command == "verify" and args.get("suite") is None:
        args["suite"] = "all"
    if command == "study" and args.get("suite") is None:
        args["suite"] = "convergence"
    try:
        if config_path:
            with open(config_path) as fh:
                cfg.apply(json.load(fh))
        cfg.apply({k: v for k, v in args.items() if v is not None})
        return _DISPATCH[command](cfg)
    except DomainError as exc:
        sys.stderr.write(f"domain error: {exc}\n")
        return 2
    except PointGasError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"io error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
