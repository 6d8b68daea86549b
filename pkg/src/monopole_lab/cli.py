"""Command-line entry point: verifications, tables and spectra as JSON Lines or CSV.

Every report starts with a header record echoing the configuration and the
library version.  Floats are written with 17 significant digits so that
reports from identical seeds are byte-identical.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional, Sequence

import numpy as np

from . import __version__
from .bps import (
    DomainError,
    MonopoleSolution,
    SeedFamily,
    SeedKind,
    Trivial,
    TypeI,
    residual_field_equations,
)
from .dirac_radial import (
    DoubletRadialSystem,
    SpectralProblem,
    j0_complex_diagnostics,
    spectrum_s3,
    w_from_solution,
)
from .gauge import IsoGaugeFrame, delta_matrix, gauge_pipeline, rotation_from_gibbs, transition_gibbs
from .geometry import CurvatureModel, Kind
from .symmetry import (
    Realization,
    StateKind,
    U_A_matrix,
    apply_K_hat,
    apply_N_A,
    constrained_doublet,
    doublet_state,
    hidden_symmetry_defects,
    k_hat_state,
    K_hat_expected,
    na_consistency_residual,
    selection_factor,
    selection_rule,
    su2_algebra_defect,
    transport_schwinger_to_cartesian,
    up_to_phase,
)
from .wigner import D_sep, HalfInt, d_small, recursion_report, rotation_matrix_oracle

TOOL = "monopole-lab"
RNG_NAME = "numpy.random.default_rng (PCG64)"
THREADS_ENV = "MONOPOLE_LAB_THREADS"

EXIT_OK, EXIT_TOLERANCE, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    """Configuration that cannot be run; reported with exit status 2."""


# --- serialization -----------------------------------------------------------

def _num(x: float) -> str:
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return format(x, ".17g")


def to_json(obj: Any) -> str:
    """Compact JSON with every float printed to 17 significant digits."""
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return to_json({"re": obj.real, "im": obj.imag})
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, HalfInt):
        return json.dumps(str(obj))
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(to_json(v) for v in obj) + "]"
    return json.dumps(str(obj))


def _cell(v: Any) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


# --- configuration -----------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    command: str
    action: Optional[str] = None
    model: str = "euclid"
    rho: float = 1.0
    j: str = "1"
    m: float = 1.0
    A: float = 0.0
    e: float = 1.0
    grid_n: int = 400
    seed: int = 0
    output_format: str = "json"
    output_path: Optional[str] = None
    options: dict = field(default_factory=dict)

    def echo(self) -> dict:
        d = {k: getattr(self, k) for k in ("command", "action", "model", "rho", "j", "m", "A", "e",
                                           "grid_n", "seed", "output_format", "output_path")}
        d.update(sorted(self.options.items()))
        return d


@dataclass
class Report:
    """Header, body records and per-check verdicts of one run."""

    config: RunConfig
    records: list[dict] = field(default_factory=list)
    columns: Optional[list[str]] = None
    failures: list[str] = field(default_factory=list)

    def check(self, name: str, value: float, tol: float, **extra: Any) -> None:
        ok = bool(value <= tol)
        self.records.append({"record": "check", "check": name, "value": value, "tol": tol, "pass": ok, **extra})
        if not ok:
            self.failures.append(name)

    @property
    def status(self) -> int:
        return EXIT_TOLERANCE if self.failures else EXIT_OK

    def header(self) -> dict:
        return {"record": "header", "tool": TOOL, "version": __version__, "rng": RNG_NAME,
                "config": self.config.echo()}

    def render(self) -> str:
        if self.config.output_format == "csv":
            return self._render_csv()
        lines = [to_json(self.header())] + [to_json(r) for r in self.records]
        lines.append(to_json({"record": "summary", "status": self.status, "failures": self.failures}))
        return "\n".join(lines) + "\n"

    def _render_csv(self) -> str:
        buf = io.StringIO()
        buf.write("# " + to_json(self.header()) + "\n")
        rows = self.records
        if self.columns:
            # records outside the table layout become comment lines
            for r in rows:
                if not set(self.columns) & set(r):
                    buf.write("# " + to_json(r) + "\n")
            rows = [r for r in rows if set(self.columns) & set(r)]
        cols = self.columns or sorted({k for r in rows for k in r})
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_cell(r.get(c, "")) for c in cols])
        return buf.getvalue()


def threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None


def pmap(fn: Callable, items: Sequence) -> list:
    """Order-preserving map capped by MONOPOLE_LAB_THREADS."""
    n = threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _model(cfg: RunConfig) -> CurvatureModel:
    try:
        return CurvatureModel(Kind(cfg.model), cfg.rho)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _solution(cfg: RunConfig, model: Optional[CurvatureModel] = None) -> MonopoleSolution:
    o = cfg.options
    model = model or _model(cfg)
    if o.get("kind", "trivial") == "trivial":
        return MonopoleSolution(model, Trivial(o.get("b1", 0.0), o.get("b2", 0.0)), cfg.e)
    seed = SeedFamily(SeedKind(o.get("family", "hyperbolic")), o.get("seed_A", 1.0), o.get("seed_B", 0.0),
                      o.get("sign", 1))
    return MonopoleSolution(model, TypeI(o.get("a1", 0.8), o.get("C", 0.5), seed), cfg.e)


def _usable_radii(sol: MonopoleSolution, lo: float, hi: float, n: int) -> list[float]:
    out = []
    for r in np.linspace(lo, hi, n):
        try:
            sol.K(float(r))
        except DomainError:
            continue
        out.append(float(r))
    return out


# --- subcommands -------------------------------------------------------------

def _bps(cfg: RunConfig, rep: Report) -> None:
    sol = _solution(cfg)
    o = cfg.options
    model = sol.model
    hi = min(o.get("rmax", 1.8), 0.95 * model.r_max)
    radii = _usable_radii(sol, o.get("rmin", 0.2), hi, o.get("points", 50))
    if not radii:
        raise UsageError("no singularity-free radii in the requested range")
    rep.records.append({"record": "solution", **sol.to_record()})
    if cfg.action == "table":
        rep.columns = ["r", "K", "Phi"]
        for r in radii:
            rep.records.append({"r": r, "K": sol.K(r), "Phi": sol.Phi(r)})
        return
    res = pmap(lambda r: residual_field_equations(sol, r), radii)
    rep.check("bps_residual_Phi", max(abs(a) for a, _ in res), o.get("tol", 1e-8), points=len(radii))
    rep.check("bps_residual_K", max(abs(b) for _, b in res), o.get("tol", 1e-8), points=len(radii))


def _parse_half(text: str) -> HalfInt:
    try:
        return HalfInt.of(text)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"not a half-integer: {text!r}") from exc


def _wigner(cfg: RunConfig, rep: Report) -> None:
    o = cfg.options
    if cfg.action == "eval":
        j, m, s = _parse_half(cfg.j), _parse_half(o["m_index"]), _parse_half(o["sigma"])
        theta, phi = o["theta"], o.get("phi", 0.0)
        rep.records.append({"record": "value", "j": str(j), "m": str(m), "sigma": str(s), "theta": theta,
                            "phi": phi, "d": float(d_small(j, m, s, theta)),
                            "D_sep": complex(D_sep(j, m, s, phi, theta))})
        return
    rng = np.random.default_rng(cfg.seed)
    jmax = _parse_half(o.get("jmax", "7/2"))
    angles = rng.uniform(0.0, math.pi, o.get("samples", 20))
    js = [HalfInt(d) for d in range(1, jmax.doubled + 1)]

    def oracle_err(j: HalfInt) -> float:
        worst = 0.0
        ms = [HalfInt(d) for d in range(j.doubled, -j.doubled - 1, -2)]
        for beta in angles:
            ref = rotation_matrix_oracle(j, float(beta))
            for a, mp in enumerate(ms):
                for b, mm in enumerate(ms):
                    worst = max(worst, abs(float(d_small(j, mp, mm, float(beta))) - ref[a, b].real))
        return worst

    errs = pmap(oracle_err, js)
    for j, err in zip(js, errs):
        rep.records.append({"record": "oracle", "j": str(j), "max_error": err})
    rep.check("wigner_oracle", max(errs), o.get("tol", 1e-12), angles=len(angles))
    worst = 0.0
    ks = [HalfInt(d) for d in range(-4, 5)]
    for j in js:
        for beta in angles[:5]:
            for k in ks:
                if (j - k - HalfInt(1)).is_integer:
                    for md in range(-j.doubled, j.doubled + 1, 2):
                        worst = max(worst, recursion_report(j, HalfInt(md), k, float(beta)).max_defect)
    rep.check("wigner_recursions", worst, 1e-10)


def _gauge(cfg: RunConfig, rep: Report) -> None:
    o = cfg.options
    if cfg.action == "rotate":
        c = np.array(o.get("c", [0.3, -0.2, 0.5]), float)
        O = rotation_from_gibbs(c)
        rep.records.append({"record": "rotation", "c": c, "O": O, "Delta": delta_matrix(c)})
        rep.check("orthogonality", float(np.max(np.abs(O @ O.T - np.eye(3)))), 1e-13)
        rep.check("unit_determinant", abs(float(np.linalg.det(O)) - 1.0), 1e-13)
        return
    sol = _solution(cfg)
    r = o.get("radius", 1.0)
    n_t, n_p = o.get("ntheta", 20), o.get("nphi", 20)
    thetas = np.linspace(0.05, math.pi - 0.05, n_t)
    phis = np.linspace(-math.pi + 0.05, math.pi - 0.05, n_p)
    for pr in gauge_pipeline(sol.K, sol.Phi, r, thetas, phis, cfg.e):
        rep.records.append({"record": "pipeline", "frame_from": pr.frame_from, "frame_to": pr.frame_to,
                            "max_defect_Phi": pr.max_defect_Phi, "max_defect_W": pr.max_defect_W})
        rep.check(f"gauge_{pr.frame_from}_to_{pr.frame_to}", max(pr.max_defect_Phi, pr.max_defect_W),
                  o.get("tol", 1e-12))


def _w_profile(cfg: RunConfig) -> Optional[Callable]:
    prof = cfg.options.get("w_profile", "zero")
    if prof in ("zero", "trivial"):
        # the trivial background has e r^2 K = -1, so W vanishes identically
        return None
    if prof == "typeI":
        sol = _solution(RunConfig(**{**cfg.__dict__, "options": {**cfg.options, "kind": "typeI"}}),
                        CurvatureModel.riemann(1.0))
        W = w_from_solution(sol)
        try:
            W(np.linspace(1e-3, math.pi - 1e-3, 401))
        except DomainError as exc:
            raise UsageError(f"typeI background is singular on S3: {exc}") from None
        return W
    raise UsageError(f"unknown W profile {prof!r}")


def _spectrum(cfg: RunConfig, rep: Report) -> None:
    if cfg.model != "riemann":
        raise UsageError("the discrete spectrum is computed on S3 only (use --model riemann)")
    o = cfg.options
    j = _parse_half(cfg.j)
    W = _w_profile(cfg)
    try:
        system = DoubletRadialSystem(0.0, cfg.m, j, W=W, delta=o.get("delta", 1), mu=o.get("mu", 1))
        problem = SpectralProblem(system, grid_n=cfg.grid_n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    count = o.get("count", 5)
    report = spectrum_s3(problem, count)
    rec = {"record": "spectrum", "variant": system.variant.value, "eigenvalues": list(report.eigenvalues),
           "drift": list(report.drift), "grid": report.grid_n, "coarse": list(report.coarse),
           "window": list(report.window), "diagnostic": report.diagnostic}
    if system.variant.value == "j0" and W is not None:
        diag = j0_complex_diagnostics(problem, min(count, 3))
        rec["complex_roots"] = list(diag.roots)
        rec["max_imag"] = diag.max_imag
        rec["hermiticity_defect"] = diag.hermiticity_defect
    rep.records.append(rec)
    rep.check("spectrum_drift", report.max_drift if report.eigenvalues else math.inf, o.get("tol", 1e-6))
    rep.check("spectrum_count_shortfall", float(count - len(report.eigenvalues)), 0.0)


def _jrange(text: str) -> list[HalfInt]:
    try:
        lo, hi = (HalfInt.of(p) for p in text.split(".."))
    except ValueError:
        raise UsageError(f"--jrange must look like 0..3, got {text!r}") from None
    return [HalfInt(d) for d in range(lo.doubled, hi.doubled + 1, 2)]


def _selection(cfg: RunConfig, rep: Report) -> None:
    o = cfg.options
    omegas = [o["omega"]] if o.get("omega") is not None else [1, -1]
    js = _jrange(o.get("jrange", "0..3"))
    rep.columns = ["Omega", "delta", "delta_prime", "J", "J_prime", "factor", "outcome"]
    for om in omegas:
        for d in (1, -1):
            for dp in (1, -1):
                for J in js:
                    for Jp in js:
                        rep.records.append({"Omega": om, "delta": d, "delta_prime": dp, "J": str(J),
                                            "J_prime": str(Jp), "factor": selection_factor(om, d, dp, J, Jp),
                                            "outcome": selection_rule(om, d, dp, J, Jp).value})


def _symmetry(cfg: RunConfig, rep: Report) -> None:
    o = cfg.options
    rng = np.random.default_rng(cfg.seed)
    jmax = o.get("jmax", 4)
    tol = o.get("tol", 1e-12)
    realizations = {"pauli_half": Realization.pauli("1/2"), "abelian_half": Realization.abelian("1/2"),
                    "doublet_schwinger": Realization.doublet(), "dirac_k1": Realization.dirac(1),
                    "wu_yang_north": Realization.wu_yang("1/2", "north"),
                    "wu_yang_south": Realization.wu_yang("1/2", "south")}
    for name, rz in realizations.items():
        rep.check(f"su2_{name}", su2_algebra_defect(rz, jmax), tol)
    theta = rng.uniform(0.3, math.pi - 0.3, 12)
    phi = rng.uniform(-math.pi, math.pi, 12)
    for kind, j, m, sgn, k in ((StateKind.ABELIAN, "2", "1", 1, "1/2"), (StateKind.ELECTRON, "3/2", "1/2", -1, 0),
                               (StateKind.DOUBLET, "2", "1", -1, 0)):
        r = apply_K_hat(k_hat_state(kind, j, m, sgn, k, *rng.normal(size=2)), theta, phi)
        rep.check(f"K_hat_{kind.value}", max(r.defect, abs(r.eigenvalue - K_hat_expected(kind, j, sgn, k))), tol,
                  eigenvalue=r.eigenvalue)
    A = float(cfg.A)
    f = rng.normal(size=4) + 1j * rng.normal(size=4)
    na = apply_N_A(A, constrained_doublet(1, 0, f, A, 1))
    rep.check("N_A_constrained", na.defect, tol, eigenvalue=na.eigenvalue)
    free = apply_N_A(A, doublet_state(1, 0, f, rng.normal(size=4)))
    rep.records.append({"record": "info", "check": "N_A_unconstrained_defect", "value": free.defect})
    c = transition_gibbs(IsoGaugeFrame.CARTESIAN, IsoGaugeFrame.SCHWINGER)
    worst = max(up_to_phase(U_A_matrix("cartesian", A, t, p), transport_schwinger_to_cartesian(A, c((1.0, t, p))))
                for t, p in zip(theta, phi))
    rep.check("U_A_transport", worst, tol)
    hs = hidden_symmetry_defects(1, A)
    rep.check("H_commutes_t3", hs.H_t3, tol)
    rep.check("H_commutes_N_A", hs.H_N, tol)
    rep.check("H_commutes_K_hat", hs.H_K, tol)
    rep.records.append({"record": "info", "check": "t3_N_A_commutator", "value": hs.t3_N})
    samples = np.linspace(0.0, 2 * math.pi, o.get("a_samples", 64), endpoint=False)
    zero_at = [float(a) for a in samples if na_consistency_residual(float(a), 0.8) < 1e-10]
    rep.records.append({"record": "info", "check": "N_A_consistent_angles", "value": zero_at})


COMMANDS: dict[str, Callable[[RunConfig, Report], None]] = {
    "bps": _bps, "wigner": _wigner, "gauge": _gauge, "spectrum": _spectrum,
    "selection-rules": _selection, "symmetry": _symmetry,
}


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute one command; returns (exit status, rendered report)."""
    handler = COMMANDS.get(cfg.command)
    if handler is None:
        return EXIT_USAGE, f"unknown command {cfg.command!r}\n"
    rep = Report(cfg)
    try:
        handler(cfg, rep)
    except UsageError as exc:
        return EXIT_USAGE, f"error: {exc}\n"
    return rep.status, rep.render()


# --- argument parsing --------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=[k.value for k in Kind], default="euclid")
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--e", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", dest="output_format", choices=["json", "csv"], default="json")
    p.add_argument("--output", dest="output_path")


def _background(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kind", choices=["trivial", "typeI"], default="trivial")
    p.add_argument("--family", choices=[s.value for s in SeedKind], default="hyperbolic")
    p.add_argument("--a1", type=float, default=0.8)
    p.add_argument("--C", type=float, default=0.5)
    p.add_argument("--seed-A", dest="seed_A", type=float, default=1.0)
    p.add_argument("--seed-B", dest="seed_B", type=float, default=0.0)
    p.add_argument("--sign", type=int, choices=[1, -1], default=1)
    p.add_argument("--b1", type=float, default=0.0)
    p.add_argument("--b2", type=float, default=0.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=TOOL, description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    bps = sub.add_parser("bps", help="BPS monopole residuals and profile tables")
    bps.add_argument("action", choices=["verify", "table"])
    _common(bps)
    _background(bps)
    bps.add_argument("--points", type=int, default=50)
    bps.add_argument("--rmin", type=float, default=0.2)
    bps.add_argument("--rmax", type=float, default=1.8)
    bps.add_argument("--tol", type=float, default=1e-8)

    wig = sub.add_parser("wigner", help="Wigner d-function values and conformance checks")
    wig.add_argument("action", choices=["eval", "check"])
    _common(wig)
    wig.add_argument("--j", default="1/2")
    wig.add_argument("--m-index", dest="m_index", default="1/2")
    wig.add_argument("--sigma", default="1/2")
    wig.add_argument("--theta", type=float, default=0.5)
    wig.add_argument("--phi", type=float, default=0.0)
    wig.add_argument("--jmax", default="7/2")
    wig.add_argument("--samples", type=int, default=20)
    wig.add_argument("--tol", type=float, default=1e-12)

    gau = sub.add_parser("gauge", help="Gibbs-vector rotations and the unitary-gauge pipeline")
    gau.add_argument("action", choices=["rotate", "verify"])
    _common(gau)
    _background(gau)
    gau.add_argument("--c", type=float, nargs=3, default=[0.3, -0.2, 0.5])
    gau.add_argument("--radius", type=float, default=1.0)
    gau.add_argument("--ntheta", type=int, default=20)
    gau.add_argument("--nphi", type=int, default=20)
    gau.add_argument("--tol", type=float, default=1e-12)

    spe = sub.add_parser("spectrum", help="discrete doublet spectrum on S3")
    _common(spe)
    _background(spe)
    spe.add_argument("--j", default="1")
    spe.add_argument("--mass", dest="m", type=float, default=1.0)
    spe.add_argument("--w-profile", dest="w_profile", choices=["zero", "trivial", "typeI"], default="zero")
    spe.add_argument("--grid", dest="grid_n", type=int, default=800)
    spe.add_argument("--count", type=int, default=5)
    spe.add_argument("--delta", type=int, choices=[1, -1], default=1)
    spe.add_argument("--mu", type=int, choices=[1, -1], default=1)
    spe.add_argument("--tol", type=float, default=1e-6)

    sel = sub.add_parser("selection-rules", help="parity selection-rule truth table")
    _common(sel)
    sel.add_argument("--omega", type=int, choices=[1, -1])
    sel.add_argument("--jrange", default="0..3")
    sel.set_defaults(output_format="csv")

    sym = sub.add_parser("symmetry", help="discrete-operator and algebra defect reports")
    sym.add_argument("action", choices=["check"])
    _common(sym)
    sym.add_argument("--A", type=float, default=0.7)
    sym.add_argument("--jmax", type=float, default=4)
    sym.add_argument("--tol", type=float, default=1e-12)
    return parser


_CONFIG_FIELDS = {"command", "action", "model", "rho", "j", "m", "A", "e", "grid_n", "seed",
                  "output_format", "output_path"}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    d = vars(ns).copy()
    known = {k: d.pop(k) for k in list(d) if k in _CONFIG_FIELDS}
    known.setdefault("action", None)
    return RunConfig(**known, options=d)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    status, text = run(config_from_args(ns))
    if status == EXIT_USAGE:
        sys.stderr.write(text)
        return status
    if ns.output_path:
        with open(ns.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status
