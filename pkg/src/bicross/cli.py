"""Command line: bicross <subcommand> --group SPEC [--factor SEL] [options].

Every subcommand writes <output-dir>/<subcommand>.json and prints a short
summary.  Exit codes: 0 all checks pass, 1 some check failed, 2 bad usage or
input.  BICROSS_OUTPUT_DIR and BICROSS_WORKERS override the defaults.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bicrossproduct import (basis_selfduality_converse_check, build_H, build_Hdual, duality_pairing,
                             theta_tilde, verify_antipode_pairing, verify_pairing, verify_theta_tilde)
from .double import (build_double_bicross, build_double_general, build_group_double, coadjoint_actions, double_R,
                     verify_coadjoint_actions, verify_equivariance, verify_mutual_action_identity, verify_psi,
                     verify_quasitriangular)
from .errors import BicrossError
from .groups import automorphism_group, dihedral_group, find_isomorphisms, group_to_json, load_group
from .hopf import verify_hopf_axioms, verify_star
from .linalg import cycle_structure, minimal_polynomial
from .matched_pair import (exact_factorizations, find_factor_preserving_or_reversing, find_factor_reversing,
                           matched_pair_to_json, select_factorization, verify_matched_pair)
from .report import Report, jsonable
from .representations import (BicrossedBimodule, braiding, chi_to_DX, module_from_double_action,
                              double_action, schrodinger_module, verify_bicrossed_bimodule,
                              verify_braiding_naturality, verify_c_map, verify_chi, verify_schrodinger,
                              verify_schrodinger_braiding, ybe_check)
from .sparse import Sparse
from .sweep import SWEEP_GROUPS, sweep, sweep_group
from .twisting import (cocycle_F, cocycle_F_inverse, coboundary_obstruction_check, quasitriangular_transport_check,
                       twisted_coproduct_check, verify_2cocycle, verify_psi_iso)

COMMANDS = ("factorize", "build", "check", "selfdual", "double", "braiding", "modules", "twist-check", "all")


@dataclass
class RunConfig:
    group: str | None
    factor: str | None
    exhaustive_dim_cap: int
    sample_size: int
    seed: int
    output_dir: Path
    workers: int

    def to_dict(self) -> dict:
        # workers is left out so reports do not depend on it
        return {"group": self.group, "factor": self.factor, "exhaustive_dim_cap": self.exhaustive_dim_cap,
                "sample_size": self.sample_size, "seed": self.seed}


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bicross", description="Bicrossproduct Hopf algebras, doubles and braidings")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", help="builtin spec (cyclic:n, dihedral:n, sym:n, product:a,b) or group JSON path")
    common.add_argument("--factor", help="factorization index or alias (z6z6)")
    common.add_argument("--output-dir", default=os.environ.get("BICROSS_OUTPUT_DIR", "bicross-out"))
    common.add_argument("--workers", type=int, default=int(os.environ.get("BICROSS_WORKERS", "1")))
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--exhaustive-dim-cap", type=int, default=64)
    common.add_argument("--sample-size", type=int, default=100000)
    sub = p.add_subparsers(dest="command", metavar="{" + ",".join(COMMANDS) + "}")
    sub.required = True
    sub.add_parser("factorize", parents=[common], help="list exact factorizations")
    b = sub.add_parser("build", parents=[common], help="build H and H*")
    b.add_argument("--export", action="store_true", help="write H and H* as Hopf JSON")
    sub.add_parser("check", parents=[common], help="Hopf axiom sweep (all builtin sweep groups without --group)")
    s = sub.add_parser("selfdual", parents=[common], help="factor-reversing automorphisms and θ̃")
    s.add_argument("--export-pairing", action="store_true")
    d = sub.add_parser("double", parents=[common], help="build D(H)")
    d.add_argument("--method", choices=("general", "bicross", "both"), default="both")
    d.add_argument("--export", action="store_true")
    d.add_argument("--r-element", action="store_true")
    br = sub.add_parser("braiding", parents=[common], help="Schrödinger braiding")
    br.add_argument("--minpoly", action="store_true")
    br.add_argument("--ybe", action="store_true")
    br.add_argument("--cycles", action="store_true")
    br.add_argument("--export", action="store_true")
    m = sub.add_parser("modules", parents=[common], help="verify a module JSON, or the Schrödinger module")
    m.add_argument("--module", help="path to module JSON")
    m.add_argument("--export", action="store_true", help="write the Schrödinger module JSON")
    t = sub.add_parser("twist-check", parents=[common], help="cocycle, ψ, twisted coproduct, R, coboundary")
    t.add_argument("--export-F", action="store_true")
    sub.add_parser("all", parents=[common], help="every check for one factorization")
    return p


def _config(args) -> RunConfig:
    if args.sample_size <= 0 or args.exhaustive_dim_cap < 1 or args.workers < 1:
        raise UsageError("--sample-size and --workers must be positive, --exhaustive-dim-cap at least 1")
    return RunConfig(args.group, args.factor, args.exhaustive_dim_cap, args.sample_size, args.seed,
                     Path(args.output_dir), args.workers)


def _mp(cfg: RunConfig):
    if cfg.group is None:
        raise UsageError("--group is required")
    x = load_group(cfg.group)
    if cfg.factor is None:
        facts = exact_factorizations(x)
        nontrivial = [i for i, (g, m) in enumerate(facts) if g.order > 1 and m.order > 1]
        return select_factorization(x, nontrivial[0] if nontrivial else 0)
    return select_factorization(x, cfg.factor)


def _write(cfg: RunConfig, name: str, obj) -> Path:
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.output_dir / name
    path.write_text(json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n")
    return path


def _sample(cfg: RunConfig, dim: int) -> np.ndarray | None:
    """Basis indices for per-element checks: all of them unless dim exceeds the cap
    and the sample is smaller than dim."""
    if dim <= cfg.exhaustive_dim_cap or cfg.sample_size >= dim:
        return None
    return np.sort(np.random.default_rng(cfg.seed).choice(dim, cfg.sample_size, replace=False))


# subcommands; each returns (Report, extra JSON)

def cmd_factorize(cfg, args):
    if cfg.group is None:
        raise UsageError("--group is required")
    x = load_group(cfg.group)
    rep = Report("factorizations")
    rows = []
    for i, (g, m) in enumerate(exact_factorizations(x)):
        mp = select_factorization(x, i)
        rep.extend(verify_matched_pair(mp), f"[{i}] ")
        rows.append({"index": i, "G_order": g.order, "M_order": m.order, "G": list(g.elements),
                     "M": list(m.elements), "G_cyclic": g.is_cyclic(), "M_cyclic": m.is_cyclic()})
    extra = {"group": group_to_json(x), "factorizations": rows}
    if cfg.factor is not None:
        extra["matched_pair"] = matched_pair_to_json(select_factorization(x, cfg.factor))
    return rep, extra


def cmd_build(cfg, args):
    mp = _mp(cfg)
    h, hd = build_H(mp), build_Hdual(mp)
    rep = Report("H and H*")
    rep.extend(verify_matched_pair(mp), "matched pair: ")
    rep.extend(verify_hopf_axioms(h, involutive=True), "H: ").extend(verify_star(h), "H: ")
    rep.extend(verify_hopf_axioms(hd, involutive=True), "H*: ").extend(verify_star(hd), "H*: ")
    rep.extend(verify_antipode_pairing(mp, h, hd))
    if getattr(args, "export", False):
        _write(cfg, "H.json", h.to_json())
        _write(cfg, "Hdual.json", hd.to_json())
    return rep, {"dim": h.dim, "matched_pair": matched_pair_to_json(mp)}


def cmd_check(cfg, args):
    specs = [cfg.group] if cfg.group else SWEEP_GROUPS
    out = sweep(specs, workers=cfg.workers)
    rep = Report("Hopf axiom sweep")
    for g in out["groups"]:
        for r in g["results"]:
            rep.add(f"{g['group']} factorization {r['index']}: H, H*, D(H)", r["report"]["passed"],
                    None if r["report"]["passed"] else {"failures": [c for c in r["report"]["checks"] if not c["passed"]]},
                    detail=r["D(H) axioms"])
        rep.add(f"{g['group']}: D(X)", g["D(X)"]["passed"])
    return rep, out


def cmd_selfdual(cfg, args):
    mp = _mp(cfg)
    h, hd = build_H(mp), build_Hdual(mp)
    thetas = find_factor_reversing(mp)
    rep = Report("self-duality")
    per = []
    for k, th in enumerate(thetas):
        r = verify_theta_tilde(mp, th, h, hd)
        r.extend(verify_pairing(h, duality_pairing(mp, th)))
        back, conv = basis_selfduality_converse_check(mp, theta_tilde(mp, th))
        r.extend(conv)
        r.add("converse reconstruction returns θ", back is not None and back == th)
        rep.extend(r, f"θ[{k}]: ")
        per.append({"theta": list(th.map), "report": r.to_dict()})
    either = find_factor_preserving_or_reversing(mp)
    # distinct θ could in principle give the same pairing; report rather than assume
    pairings = {tuple(theta_tilde(mp, th).permutation_images().tolist()) for th in thetas}
    extra = {"factor_reversing": len(thetas), "preserving_or_reversing": len(either),
             "distinct_pairings": len(pairings), "per_theta": per}
    if thetas:
        auto = automorphism_group(either)
        extra["preserving_or_reversing_is_dihedral"] = (auto.order % 2 == 0 and auto.order >= 4
                                                        and bool(find_isomorphisms(auto, dihedral_group(auto.order // 2))))
    if getattr(args, "export_pairing", False):
        for k, th in enumerate(thetas):
            b = duality_pairing(mp, th)
            _write(cfg, f"pairing_{k}.json", _matrix_json(b))
    return rep, extra


def _matrix_json(a: Sparse) -> dict:
    from .report import fmt_scalar
    return {"rows": a.shape[0], "cols": a.shape[1], "entries": [[int(i), int(j), fmt_scalar(v)] for (i, j), v in a.entries()]}


def _element_json(a: Sparse) -> dict:
    from .report import fmt_scalar
    return {"shape": list(a.shape), "entries": [[*map(int, k), fmt_scalar(v)] for k, v in a.entries()]}


def cmd_double(cfg, args):
    mp = _mp(cfg)
    h = build_H(mp)
    method = getattr(args, "method", "both")
    rep = Report("quantum double")
    rep.extend(verify_coadjoint_actions(mp, h))
    rep.extend(verify_mutual_action_identity(h))
    db = build_double_bicross(mp, h) if method in ("bicross", "both") else None
    dg = build_double_general(h) if method in ("general", "both") else None
    if method == "both":
        diffs = db.differences(dg)
        rep.add("cross-relation build equals general build", not diffs, {"differing": diffs} if diffs else None)
    dh = db if db is not None else dg
    rep.extend(verify_hopf_axioms(dh, involutive=True), "D(H): ").extend(verify_star(dh), "D(H): ")
    r = double_R(dh, h)
    rep.extend(verify_quasitriangular(dh, r, _sample(cfg, dh.dim)), "D(H): ")
    dx, rx = build_group_double(mp.X)
    rep.extend(verify_hopf_axioms(dx, involutive=True), "D(X): ").extend(verify_star(dx), "D(X): ")
    rep.extend(verify_quasitriangular(dx, rx, _sample(cfg, dx.dim)), "D(X): ")
    actions = coadjoint_actions(mp)
    thetas = find_factor_reversing(mp)
    for k, th in enumerate(thetas):
        rep.extend(verify_equivariance(mp, th, actions), f"θ[{k}]: ")
        rep.extend(verify_psi(mp, th, dh), f"θ[{k}]: ")
    if getattr(args, "export", False):
        _write(cfg, "double.json", dh.to_json())
    if getattr(args, "r_element", False):
        _write(cfg, "R.json", _element_json(r.reshape((dh.dim * dh.dim,))))
    return rep, {"dim": dh.dim, "method": method, "factor_reversing": len(thetas)}


def cmd_braiding(cfg, args):
    mp = _mp(cfg)
    w = schrodinger_module(mp)
    rep = Report("braiding")
    rep.extend(verify_bicrossed_bimodule(w))
    rep.extend(verify_schrodinger_braiding(mp, w))
    psi = braiding(w, w, allow_unverified=True)
    extra = {"dim": psi.shape[0]}
    flags = [getattr(args, k, False) for k in ("minpoly", "ybe", "cycles")]
    everything = not any(flags)
    if flags[0] or everything:
        poly = minimal_polynomial(psi)
        extra["minimal_polynomial"] = poly.to_json()
        extra["minimal_polynomial_int"] = poly.int_coeffs()
    if flags[1] or everything:
        rep.extend(ybe_check(psi, w.dim))
    if flags[2] or everything:
        cycles = cycle_structure(psi)
        extra["cycles"] = {str(k): cycles.count(k) for k in sorted(set(cycles))}
    if getattr(args, "export", False):
        _write(cfg, "braiding.json", psi.to_json())
    return rep, extra


def cmd_modules(cfg, args):
    mp = _mp(cfg)
    path = getattr(args, "module", None)
    if path:
        try:
            obj = json.loads(Path(path).read_text())
            w = BicrossedBimodule.from_json(mp, obj)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"cannot read module JSON {path}: {exc}") from exc
        rep = verify_bicrossed_bimodule(w)
        if rep.passed:
            rep.extend(verify_chi(w))
        return rep, {"dim": w.dim}
    w = schrodinger_module(mp)
    rep = Report("modules")
    rep.extend(verify_bicrossed_bimodule(w), "Schrödinger: ")
    rep.extend(verify_schrodinger(mp, w))
    back = module_from_double_action(mp, double_action(w))
    rep.add("module_from_double_action inverts the induced action", back.same_as(w))
    rep.extend(verify_chi(w))
    rep.extend(verify_c_map(w, w))
    rep.extend(verify_braiding_naturality(w, w))
    if getattr(args, "export", False):
        _write(cfg, "schrodinger_module.json", w.to_json())
        _write(cfg, "schrodinger_DX_grading.json", {"gradeX": chi_to_DX(w).gradeX.tolist()})
    return rep, {"dim": w.dim}


def cmd_twist(cfg, args):
    mp = _mp(cfg)
    dx = build_group_double(mp.X)[0]
    rep = Report("twisting")
    f = cocycle_F(mp)
    rep.extend(verify_2cocycle(f, dx, cocycle_F_inverse(mp)), "F: ")
    rep.extend(verify_psi_iso(mp, dx=dx))
    rep.extend(twisted_coproduct_check(mp))
    rep.extend(quasitriangular_transport_check(mp))
    extra = {"F_entries": f.nnz}
    if mp.nG > 1 and mp.nM > 1:
        rep.extend(coboundary_obstruction_check(mp), "coboundary: ")
    else:
        extra["coboundary"] = "vacuous: one factor is trivial"
    if getattr(args, "export_F", False):
        _write(cfg, "F.json", _element_json(f.data))
    return rep, extra


def cmd_all(cfg, args):
    rep = Report("all")
    extra = {}
    for name, fn in (("build", cmd_build), ("selfdual", cmd_selfdual), ("double", cmd_double),
                     ("braiding", cmd_braiding), ("modules", cmd_modules), ("twist-check", cmd_twist)):
        r, e = fn(cfg, argparse.Namespace())
        rep.extend(r, f"{name}: ")
        extra[name] = e
    g = sweep_group(cfg.group, workers=cfg.workers)
    rep.add(f"sweep {cfg.group}", g["passed"])
    extra["sweep"] = g
    return rep, extra


HANDLERS = {"factorize": cmd_factorize, "build": cmd_build, "check": cmd_check, "selfdual": cmd_selfdual,
            "double": cmd_double, "braiding": cmd_braiding, "modules": cmd_modules, "twist-check": cmd_twist,
            "all": cmd_all}


def run(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    try:
        cfg = _config(args)
        rep, extra = HANDLERS[args.command](cfg, args)
    except (UsageError, BicrossError) as exc:
        print(f"bicross {args.command}: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2
    out = {"command": args.command, "config": cfg.to_dict(), "passed": rep.passed,
           "report": rep.to_dict(), "results": extra}
    path = _write(cfg, f"{args.command}.json", out)
    failures = rep.failures()
    print(f"{args.command}: {'PASS' if rep.passed else 'FAIL'} ({len(rep.checks)} checks, {len(failures)} failed)")
    for c in failures[:20]:
        print(f"  [FAIL] {c.name}")
    for key in ("minimal_polynomial_int", "cycles", "factor_reversing", "preserving_or_reversing"):
        if key in extra:
            print(f"  {key}: {extra[key]}")
    if args.command == "factorize":
        for row in extra["factorizations"]:
            print(f"  [{row['index']}] |G|={row['G_order']} |M|={row['M_order']}"
                  f"{' (both cyclic)' if row['G_cyclic'] and row['M_cyclic'] else ''}")
    print(f"  report: {path}")
    return 0 if rep.passed else 1


def main() -> None:
    sys.exit(run())
