"""Command-line front end: ``rydcool <subcommand> --scenario FILE``.

Each subcommand runs one scenario kind and writes a CSV (plus a small JSON
manifest) into the output directory. ``verify`` runs every bundled scenario
and writes a pass/fail summary. Exit codes: 0 ok, 2 schema, 3 physics
domain, 4 numerical (including failed verification checks).
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from . import __version__
from .errors import NumericalError, RydcoolError, SchemaError
from .expansion import (
    RadialAngularPotential,
    SpeciesSpec,
    anharmonicity,
    expand_closed_form,
    expand_couplings,
    expand_finite_difference,
)
from .fidelity import QubitPhononInput, coherent_oracle, fidelity, target_fidelity
from .gaussian import ChainSpec, swap_efficiency
from .hyperfine import (
    HyperfineSpec,
    build_hyperfine,
    dressing_deviation,
    manifold_basis,
    spectrum,
    stretched_state_purity,
)
from .interactions import ChannelSpec, angular_matrix, c6_channel, mixing_fraction, total_c6
from .scenario import Scenario, load_scenario
from .swap import (
    RangeSpec,
    critical_ratio,
    sample_surviving_fraction,
    surviving_fraction,
    swap_range,
    table_row_consistency,
)

OUT_DIR_ENV = "RYDCOOL_OUT_DIR"
DEFAULT_SEED = 20240501


# ---------------------------------------------------------------------------
# CSV output


@dataclass
class Table:
    filename: str
    header: list
    rows: list = field(default_factory=list)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if v == 0:
            return "0"
        return format(v, ".17g")
    return str(v)


def render_csv(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.header)
    for row in table.rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _rel(value, expected):
    if expected is None or value is None:
        return None
    if expected == 0:
        return abs(value)
    return value / expected - 1


# ---------------------------------------------------------------------------
# runners, one per scenario kind


def run_expand(sc: Scenario, jobs: int = 1) -> list:
    p = sc.parameters
    t = Table(sc.output_path, ["section", "label", "quantity", "value", "expected", "rel_error"])
    for row in p["potentials"]:
        pot = RadialAngularPotential(row["amplitude"], row["alpha"], row["a"], row["b"], row["c"])
        r = row["r"]
        closed = expand_closed_form(pot, r)
        fd = expand_finite_difference(pot, r, p["fd_step"] * r)
        quad = pot.amplitude / r ** (pot.alpha + 2)
        lin = pot.amplitude / r ** (pot.alpha + 1)
        scales = {"x": quad, "y_linear": lin, "y": quad, "z": quad}
        expected = dict(zip(scales, row["expected"] or [None] * 4))
        worst = 0.0
        for q, s in scales.items():
            v = getattr(closed, q) / s
            t.rows.append(["potential", row["label"], q, v, expected[q], _rel(v, expected[q])])
            f = getattr(fd, q)
            worst = max(worst, abs(f / getattr(closed, q) - 1) if getattr(closed, q) else abs(f))
        t.rows.append(["potential", row["label"], "xz", closed.xz / quad, None, None])
        t.rows.append(["potential", row["label"], "fd_max_rel_error", worst, None, None])
    an = p["anharmonicity"]
    if an:
        for row in an["pairs"]:
            s1 = SpeciesSpec.named(row["first"], an["trap"])
            s2 = SpeciesSpec.named(row["second"], an["trap"])
            v = anharmonicity(s1, s2, an["r"])
            t.rows.append(["anharmonicity", f"{row['first']}-{row['second']}", "value", v, row["expected"], _rel(v, row["expected"])])
    for row in p["couplings"]:
        mol = SpeciesSpec.named(row["molecule"], row["trap"])
        atom = SpeciesSpec.named(row["atom"], row["trap"])
        # tabulated C6 enters as V = -C6 (a + b cos^2 + c cos^4) / r^6
        pot = RadialAngularPotential(-row["c6"], 6, row["a"], row["b"], row["c"])
        rates = expand_couplings(pot, row["r"], mol, atom)
        for ax in ("x", "y", "z"):
            g = abs(rates[ax].G_am)
            exp = row["expected_G_z"] if ax == "z" else None
            t.rows.append(["coupling", row["label"], f"abs_G_am_{ax}_over_2pi_kHz", g, exp, _rel(g, exp)])
        t.rows.append(["coupling", row["label"], "linear_y_over_2pi_kHz_per_um", rates.linear_y, None, None])
    return [t]


def _chain_point(args):
    n, alpha, w, eta, p = args
    spec = ChainSpec(
        N=n, G_am=p["G_am"], G_aa=p["G_aa_over_G_am"] * p["G_am"], G_mm=p["G_mm_over_G_am"] * p["G_am"],
        eta=eta, alpha=alpha, omega_z=w * p["G_am"], initial_molecule_occupation=p["occupation"],
    )
    return swap_efficiency(spec, initial=p["initial"], rwa=p["rwa"])


def run_swap_chain(sc: Scenario, jobs: int = 1) -> list:
    p = sc.parameters
    grid = list(itertools.product(p["N"], p["alpha"], p["omega_over_G"], p["eta"]))
    work = [(n, a, w, e, p) for n, a, w, e in grid]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            effs = list(pool.map(_chain_point, work))
    else:
        effs = [_chain_point(w) for w in work]
    t = Table(sc.output_path, ["eta", "N", "alpha", "omega_over_G", "efficiency"])
    for (n, a, w, e), eff in zip(grid, effs):
        t.rows.append([e, n, a, w, eff])
    return [t]


def run_range(sc: Scenario, jobs: int = 1) -> list:
    p = sc.parameters
    thr = critical_ratio(p["threshold_target"])
    t = Table(sc.output_path, [
        "state_label", "r_095_um", "leroy_half_um", "feasible", "threshold_ratio", "expected_r095_um",
        "gamma_implied_ref", "gamma_implied_leroy", "gamma_mismatch", "leroy_half_implied_um", "leroy_mismatch",
    ])
    for row in p["rows"]:
        if row["ratio"] is not None:
            spec = RangeSpec.from_ratio(row["ratio"], row["r_ref"], row["power"], row["leroy_half"], row["label"])
        else:
            spec = RangeSpec(row["G_ref"], row["r_ref"], row["power"], row["gamma_r"], row["leroy_half"], row["label"])
        rep = swap_range(spec, thr)
        cons = [None] * 5
        if None not in (row["G_ref"], row["ratio"], row["G_leroy"], row["ratio_leroy"]) and row["leroy_half"] > 0:
            c = table_row_consistency(row["G_ref"], row["ratio"], row["G_leroy"], row["ratio_leroy"],
                                      row["leroy_half"], row["power"], row["r_ref"])
            cons = [c.gamma_ref, c.gamma_leroy, c.gamma_mismatch, c.implied_leroy_half, c.leroy_mismatch]
        t.rows.append([rep.label, rep.r_095, rep.leroy_half, rep.feasible, rep.threshold, row["expected_r095"], *cons])
    return [t]


def run_hyperfine(sc: Scenario, jobs: int = 1) -> list:
    p = sc.parameters
    spec = HyperfineSpec.load(p["molecule"])
    stem = Path(sc.output_path).stem
    eig = Table(sc.output_path, ["molecule", "N", "index", "energy_over_2pi_kHz", "dominant_state", "mixing"])
    summ = Table(f"{stem}-summary.csv", ["quantity", "label", "value"])
    for n in p["N"]:
        rep = spectrum(n, spec, p["B"], p["m_N"])
        for k, (e, lab, mix) in enumerate(zip(rep.eigenvalues, rep.labels, rep.mixing)):
            eig.rows.append([spec.name, n, k, e, lab, mix])
        h = build_hyperfine(n, spec)
        mt = manifold_basis(n, spec).total_projection()
        off = np.abs(h[mt[:, None] != mt[None, :]])
        summ.rows.append(["hermiticity_error", f"N={n}", float(np.max(np.abs(h - h.conj().T)))])
        summ.rows.append(["off_block_max", f"N={n}", float(off.max()) if off.size else 0.0])
        for lab, pur in stretched_state_purity(n, spec, p["B"]).items():
            summ.rows.append(["stretched_purity", lab, pur])
    d = p["dressing"]
    if d:
        rep = dressing_deviation(d["N_low"], d["N_high"], spec, p["B"], d["rabi"], d["m_N"])
        tag = f"N={d['N_low']}->{d['N_high']}"
        summ.rows.append(["detuning_full_range_over_2pi_kHz", tag, 2 * rep.spread])
        summ.rows.append(["epsilon", tag, rep.epsilon])
        summ.rows.append(["deviation", tag, rep.deviation])
        summ.rows.append(["epsilon_half_std", tag, rep.epsilon_std])
        summ.rows.append(["deviation_half_std", tag, rep.epsilon_std**2])
    return [eig, summ]


def run_fidelity(sc: Scenario, jobs: int = 1) -> list:
    p = sc.parameters
    t = Table(sc.output_path, ["a2", "n", "epsilon", "fidelity", "linearized", "oracle_fidelity", "oracle_difference"])
    for a2, n, eps in itertools.product(p["a2"], p["n"], p["epsilon"]):
        inp = QubitPhononInput.from_population(a2, n, eps)
        f = fidelity(inp)
        fo = target_fidelity(inp, coherent_oracle(inp))
        t.rows.append([a2, n, eps, f.exact, f.linearized, fo, fo - f.exact])
    return [t]


def run_interactions(sc: Scenario, jobs: int = 1) -> list:
    p = sc.parameters
    t = Table(sc.output_path, ["channel", "C6_p_over_2pi_kHz_um6", "D_p", "product", "expected", "f_mix"])
    channels, terms = [], []
    for row in p["channels"]:
        ch = ChannelSpec(
            row["N"], row["Ntilde"], row["J"], row["Jtilde"],
            d_mol=row["d_mol"], d_atom=row["d_atom"],
            energy_defect=row["energy_defect"] if row["energy_defect"] is not None else 1.0,
            atom_Ltilde=row["Ltilde"], label=row["label"],
        )
        c6 = row["c6"] if row["c6"] is not None else c6_channel(ch)
        mat = angular_matrix(ch, p["molecular_sign"], p["theta"], p["phi"], row["intermediate_m"])
        psi = np.full(mat.entries.shape[0], 1 / math.sqrt(mat.entries.shape[0]))
        ang = float(np.real(psi @ mat.entries @ psi))
        terms.append((c6, ang))
        if row["energy_defect"] is not None:
            channels.append(ch)
        t.rows.append([row["label"], c6, ang, c6 * ang, None, None])
    total = total_c6(terms)
    fmix = None
    if p["mixing_r"] is not None and channels:
        fmix = mixing_fraction(channels, p["mixing_r"], p["theta"], p["phi"], molecular_sign=p["molecular_sign"]).f_mix
    t.rows.append(["total", None, None, total, p["expected_total"], fmix])
    return [t]


RUNNERS = {
    "expand": run_expand,
    "swap-chain": run_swap_chain,
    "range": run_range,
    "hyperfine": run_hyperfine,
    "fidelity": run_fidelity,
    "interactions": run_interactions,
}


@dataclass
class RunManifest:
    tool_version: str
    scenario: str
    scenario_hash: str
    wall_time_s: float
    outputs: list


def run(sc: Scenario, out_dir: Path, jobs: int = 1) -> RunManifest:
    start = time.perf_counter()
    tables = RUNNERS[sc.kind](sc, jobs)
    written = []
    for tab in tables:
        path = out_dir / tab.filename
        write_atomic(path, render_csv(tab))
        written.append(tab.filename)
    man = RunManifest(__version__, sc.name, sc.source_hash, time.perf_counter() - start, written)
    write_atomic(out_dir / f"{Path(sc.output_path).stem}.manifest.json", json.dumps(man.__dict__, indent=2) + "\n")
    return man


# ---------------------------------------------------------------------------
# verify


def bundled_scenarios() -> list:
    root = resources.files("rydcool").joinpath("scenarios")
    return sorted((p for p in root.iterdir() if p.name.endswith(".yaml")), key=lambda p: p.name)


def _read_rows(path: Path) -> list:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _f(s: str) -> Optional[float]:
    return float(s) if s not in ("", None) else None


def _run_bundled(args):
    path, out_dir = args
    sc = load_scenario(path)
    return sc.name, sc.kind, run(sc, Path(out_dir)).outputs


def verify(out_dir: Path, jobs: int = 1, seed: int = DEFAULT_SEED) -> list:
    """Run every bundled scenario and check it against the reference values."""
    paths = [str(p) for p in bundled_scenarios()]
    work = [(p, str(out_dir)) for p in paths]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_bundled, work))
    else:
        results = [_run_bundled(w) for w in work]

    checks = []

    def check(name, value, expected, tol, ok=None):
        if ok is None:
            ok = value is not None and abs(value - expected) <= tol
        checks.append([name, value, expected, tol, bool(ok)])

    thr = critical_ratio(0.05)
    check("critical_ratio_0.05", thr, 15.24, 0.01)
    mc, se = sample_surviving_fraction(1.0, 1.0 / thr, 10**6, seed)
    check("monte_carlo_surviving_fraction", mc, surviving_fraction(1.0, 1.0 / thr), 3 * se)

    for name, kind, outputs in results:
        rows = _read_rows(out_dir / outputs[0])
        if kind == "expand":
            for r in rows:
                exp = _f(r["expected"])
                if exp is not None:
                    tol = 0.05 if r["section"] == "anharmonicity" else (0.02 if r["section"] == "coupling" else 1e-12)
                    check(f"{name}:{r['label']}:{r['quantity']}", _f(r["value"]), exp, tol * abs(exp))
                if r["quantity"] == "fd_max_rel_error":
                    check(f"{name}:{r['label']}:fd_agreement", _f(r["value"]), 0.0, 1e-6)
        elif kind == "range":
            for r in rows:
                exp = _f(r["expected_r095_um"])
                if exp is not None:
                    check(f"{name}:{r['state_label']}:r095", _f(r["r_095_um"]), exp, 0.02)
                if r["gamma_mismatch"]:
                    check(f"{name}:{r['state_label']}:gamma_consistency", _f(r["gamma_mismatch"]), 0.0, 0.03)
                    check(f"{name}:{r['state_label']}:power_law_consistency", _f(r["leroy_mismatch"]), 0.0, 0.03)
        elif kind == "swap-chain":
            by_key: dict = {}
            for r in rows:
                by_key.setdefault((int(r["N"]), float(r["omega_over_G"])), []).append((float(r["eta"]), float(r["efficiency"])))
            limits = {50.0: 0.999, 10.0: 0.982}
            for (n, w), pts in sorted(by_key.items()):
                pts.sort()
                if n == 1 and w in limits:
                    check(f"{name}:N=1:omega={w:g}G", pts[0][1], limits[w], 0.002)
                elif n > 1:
                    effs = [e for eta, e in pts if eta >= 1]
                    mono = all(b >= a - 1e-12 for a, b in zip(effs, effs[1:]))
                    check(f"{name}:N={n}:omega={w:g}G:monotone_in_eta", float(mono), 1.0, 0.0, mono)
                    if w in limits:
                        check(f"{name}:N={n}:omega={w:g}G:large_eta_limit", pts[-1][1], limits[w], 0.002)
        elif kind == "hyperfine":
            summ = _read_rows(out_dir / outputs[1])
            for r in summ:
                q, v = r["quantity"], float(r["value"])
                if q == "stretched_purity":
                    check(f"{name}:{r['label']}:purity", v, 1.0, 1e-10)
                elif q in ("hermiticity_error", "off_block_max"):
                    check(f"{name}:{r['label']}:{q}", v, 0.0, 0.0 if q == "off_block_max" else 1e-12)
                elif q == "deviation":
                    check(f"{name}:{r['label']}:deviation_bound", v, 0.0, 0.0025)
        elif kind == "fidelity":
            worst = max(abs(float(r["oracle_difference"])) for r in rows)
            check(f"{name}:oracle_agreement", worst, 0.0, 1e-12)
        elif kind == "interactions":
            total = rows[-1]
            exp = _f(total["expected"])
            if exp is not None:
                check(f"{name}:total_c6", float(total["product"]), exp, 1e-9 * abs(exp))
    return checks


# ---------------------------------------------------------------------------
# entry point


def _out_dir(arg: Optional[str]) -> Path:
    if arg:
        return Path(arg)
    return Path(os.environ.get(OUT_DIR_ENV) or ".")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rydcool", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for kind in RUNNERS:
        sp = sub.add_parser(kind, help=f"run a scenario of kind '{kind}'")
        sp.add_argument("--scenario", required=True, help="scenario YAML file")
        sp.add_argument("--out", help=f"output directory (default: ${OUT_DIR_ENV} or .)")
        sp.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for Monte-Carlo checks")
    sp = sub.add_parser("verify", help="run all bundled scenarios and check reference values")
    sp.add_argument("--out", help=f"output directory (default: ${OUT_DIR_ENV} or .)")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    return ap


def _report_error(exc: RydcoolError) -> int:
    print(json.dumps({"category": exc.category, "error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
    return exc.exit_code


def main(argv: Optional[Iterable[str]] = None) -> int:
    args = build_parser().parse_args(None if argv is None else list(argv))
    out = _out_dir(args.out)
    try:
        if args.jobs < 1:
            raise SchemaError("--jobs must be at least 1", field="--jobs")
        if args.command == "verify":
            checks = verify(out, args.jobs, args.seed)
            table = Table("verify-summary.csv", ["check", "value", "expected", "tolerance", "passed"], checks)
            write_atomic(out / table.filename, render_csv(table))
            failed = [c[0] for c in checks if not c[-1]]
            print(f"{len(checks) - len(failed)}/{len(checks)} checks passed; summary in {out / table.filename}")
            if failed:
                raise NumericalError("verification failed: " + ", ".join(failed))
            return 0
        sc = load_scenario(args.scenario)
        if sc.kind != args.command:
            raise SchemaError(f"scenario kind '{sc.kind}' does not match subcommand '{args.command}'", field="kind")
        man = run(sc, out, args.jobs)
        for name in man.outputs:
            print(out / name)
        return 0
    except RydcoolError as exc:
        return _report_error(exc)


if __name__ == "__main__":
    sys.exit(main())
