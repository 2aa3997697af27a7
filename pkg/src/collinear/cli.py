"""Command-line harness.

Every command accepts ``--spec FILE`` (a JSON object of parameters); flags
given on the command line override the file.  Reports are canonical JSON;
with ``--out`` a ``.meta.json`` sidecar holds the timestamp so the report
itself is byte-identical across reruns.

Exit codes: 0 success, 1 a verification failed, 2 budget or validation error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from typing import Dict, List, Optional

from . import __version__
from .budget import PROFILES, default_budget
from .errors import BudgetExceeded, CollinearError, NonContracting, RetryExhausted
from .exact import as_fraction, rational_str

# per-command defaults; argparse itself uses SUPPRESS so that we can tell
# which flags were typed and let them override the spec file
DEFAULTS: Dict[str, Dict[str, object]] = {}


class SpecError(Exception):
    pass


def _add(p: argparse.ArgumentParser, cmd: str, flag: str, default=None, **kw):
    dest = flag.lstrip("-").replace("-", "_")
    DEFAULTS.setdefault(cmd, {})[dest] = default
    if flag.startswith("-"):
        kw["dest"] = dest
    p.add_argument(flag, default=argparse.SUPPRESS, **kw)


def _frac(s: str) -> Fraction:
    try:
        return as_fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="collinear", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"collinear {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="JSON file with parameters (flags override it)")
    common.add_argument("--out", help="write the report here (default: stdout)")
    common.add_argument("--budget", choices=sorted(PROFILES), help="budget profile")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("count", parents=[common], help="collinear tuple counts on [a]^d")
    _add(p, "count", "--alphabet", 3, type=int)
    _add(p, "count", "--dimension", 2, type=int)
    _add(p, "count", "--r", 3, type=int)
    _add(p, "count", "--mode", "full-line", choices=["full-line", "axis-parallel"])
    _add(p, "count", "--buckets", False, action="store_true", help="dyadic line census")
    _add(p, "count", "--csv", None, help="census table as CSV")
    _add(p, "count", "--lines-out", None, help="stream every rich line as JSON lines")

    p = sub.add_parser("family", parents=[common], help="supersaturation line families")
    _add(p, "family", "--n", 16, type=int)
    _add(p, "family", "--k", 3, type=int)
    _add(p, "family", "--s", None, type=_frac)
    _add(p, "family", "--gamma", None, type=_frac)
    _add(p, "family", "--t", None, type=_frac)
    _add(p, "family", "--r", 3, type=int)
    _add(p, "family", "--density", None, type=_frac, help="also run the averaging bound on a random subset")
    _add(p, "family", "--seed", 0, type=int)

    p = sub.add_parser("containers", parents=[common], help="build, iterate and verify containers")
    _add(p, "containers", "--alphabet", 3, type=int)
    _add(p, "containers", "--dimension", 2, type=int)
    _add(p, "containers", "--r", 3, type=int)
    _add(p, "containers", "--mode", "full-line", choices=["full-line", "axis-parallel"])
    _add(p, "containers", "--random", None, help="n,m,r: a random hypergraph instead of a grid")
    _add(p, "containers", "--seed", 0, type=int)
    _add(p, "containers", "--eps", Fraction(1, 10), type=_frac)
    _add(p, "containers", "--tau", None, type=_frac, help="report the hypotheses and count budget")
    _add(p, "containers", "--iterate", False, action="store_true")
    _add(p, "containers", "--f", Fraction(1, 2), type=_frac)
    _add(p, "containers", "--stop-size", None, type=int)

    p = sub.add_parser("construct", parents=[common], help="derive parameters, sample and clean")
    _add(p, "construct", "--regime", "gp-3and4",
         choices=["gp-3and4", "eps-net", "weak-net", "cover-decomp"])
    for flag, typ in (("--n", int), ("--k", int), ("--f", _frac), ("--gamma", _frac),
                      ("--a", int), ("--d", int), ("--r", int), ("--p", _frac), ("--t", int),
                      ("--T", int)):
        _add(p, "construct", flag, None, type=typ)
    _add(p, "construct", "--seed", 0, type=int)

    p = sub.add_parser("project", parents=[common], help="generic planar projection of a grid set")
    _add(p, "project", "--alphabet", 3, type=int)
    _add(p, "project", "--dimension", 2, type=int)
    _add(p, "project", "--mode", "full-line", choices=["full-line", "axis-only"])
    _add(p, "project", "--points", None, help="JSON file with a list of integer points")
    _add(p, "project", "--seed", 0, type=int)
    _add(p, "project", "--dual", False, action="store_true", help="also report the dual lines")

    p = sub.add_parser("analyze", parents=[common], help="general position, nets, colourings, LLL")
    _add(p, "analyze", "task", None, nargs="?",
         choices=["general-position", "net", "two-color", "lll", "rich-lines"])
    _add(p, "analyze", "--alphabet", 3, type=int)
    _add(p, "analyze", "--dimension", 2, type=int)
    _add(p, "analyze", "--mode", "full-line", choices=["full-line", "axis-only"])
    _add(p, "analyze", "--seed", 0, type=int)
    _add(p, "analyze", "--threshold", 3, type=int)
    _add(p, "analyze", "--eps", None, type=_frac)
    _add(p, "analyze", "--weak", False, action="store_true")
    _add(p, "analyze", "--projective", False, action="store_true")
    _add(p, "analyze", "--T", 2, type=int)
    _add(p, "analyze", "--r", 4, type=int)

    p = sub.add_parser("pipeline", parents=[common], help="grid -> random -> clean -> project -> analyze")
    _add(p, "pipeline", "--regime", "gp-3and4",
         choices=["gp-3and4", "eps-net", "weak-net", "cover-decomp"])
    for flag, typ in (("--n", int), ("--r", int), ("--a", int), ("--d", int), ("--p", _frac),
                      ("--t", int), ("--T", int), ("--gamma", _frac)):
        _add(p, "pipeline", flag, None, type=typ)
    _add(p, "pipeline", "--seed", 0, type=int)
    return ap


def _load_spec(path: Optional[str], command: str) -> dict:
    if not path:
        return {}
    try:
        with open(path) as fh:
            spec = json.load(fh)
    except OSError as e:
        raise SpecError(f"{path}: cannot read spec ({e.strerror})")
    except json.JSONDecodeError as e:
        raise SpecError(f"{path}:{e.lineno}:{e.colno}: malformed JSON: {e.msg}")
    if not isinstance(spec, dict):
        raise SpecError(f"{path}: spec must be a JSON object, got {type(spec).__name__}")
    if "command" in spec and spec["command"] != command:
        raise SpecError(f"{path}: /command is {spec['command']!r} but {command!r} was invoked")
    allowed = DEFAULTS[command]
    for key in spec:
        if key not in allowed and key not in ("command", "budget"):
            raise SpecError(f"{path}: /{key}: not a parameter of {command!r} "
                            f"(expected one of {sorted(allowed)})")
    return spec


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults <- spec file <- command-line flags into one normalized spec."""
    cmd = args.command
    spec_file = _load_spec(args.spec, cmd)
    merged = dict(DEFAULTS[cmd])
    for k, v in spec_file.items():
        if k in merged:
            merged[k] = v
    given = vars(args)
    for k in DEFAULTS[cmd]:
        if k in given:
            merged[k] = given[k]
    budget = args.budget or spec_file.get("budget")
    if budget is not None and budget not in PROFILES:
        raise SpecError(f"{args.spec}: /budget: unknown profile {budget!r}")
    out = {"command": cmd}
    for k, v in sorted(merged.items()):
        if isinstance(v, Fraction):
            v = rational_str(v)
        out[k] = v
    out["budget"] = budget or "default"
    return out


def _budget(spec: dict):
    return PROFILES[spec["budget"]] if spec["budget"] != "default" else default_budget()


def _f(spec: dict, key: str) -> Optional[Fraction]:
    v = spec.get(key)
    if v is None:
        return None
    try:
        return as_fraction(v)
    except (ValueError, ZeroDivisionError, TypeError):
        raise SpecError(f"/{key}: not a rational number: {v!r}")


def _int(spec: dict, key: str) -> Optional[int]:
    v = spec.get(key)
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, int):
        try:
            return int(str(v))
        except ValueError:
            raise SpecError(f"/{key}: expected an integer, got {v!r}")
    return v


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_count(spec: dict):
    from . import grid
    from .report import write_csv, write_jsonl
    a, d, r = _int(spec, "alphabet"), _int(spec, "dimension"), _int(spec, "r")
    budget = _budget(spec)
    res = grid.hypergraph_summary(a, d, r, spec["mode"], budget)
    res["census_identity"] = (grid.tuples_from_census(grid.line_census(a, d, 2, spec["mode"], budget), r)
                              == res["edge_count"])
    if spec["buckets"]:
        res["buckets"] = grid.bucket_line_census(a, d, r, budget).to_json()
    if spec["csv"]:
        write_csv(spec["csv"], ["points", "lines"], [(c["points"], c["lines"]) for c in res["census"]])
    if spec["lines_out"]:
        res["lines_streamed"] = write_jsonl(
            spec["lines_out"], (l.to_json() for l in grid.enumerate_rich_lines(a, d, max(r, 2), spec["mode"], budget)))
    return res, res["census_identity"]


def cmd_family(spec: dict):
    from . import families
    from .construction import p_random_subset
    n, k = _int(spec, "n"), _int(spec, "k")
    budget = _budget(spec)
    if k == 3 and spec.get("gamma") is None:
        F = families.build_family_3d(n, _f(spec, "s") or 0, _f(spec, "t"))
    else:
        F = families.build_family_general(n, k, _f(spec, "gamma") or Fraction(1, 2), _f(spec, "t"))
    res = families.verify_family(F, budget)
    ok = res["ok"]
    if spec.get("density") is not None:
        S = p_random_subset(n, k, _f(spec, "density"), _int(spec, "seed"), budget)
        inc = families.incidence_average_bound(S, F, _int(spec, "r"), budget)
        res["incidence"] = inc.to_json()
        res["incidence"]["subset_size"] = len(S)
        ok = ok and inc.holds
    return res, ok


def _grid_hypergraph(spec: dict):
    from .grid import collinear_edges
    from .hypergraph import Hypergraph, random_hypergraph
    from .construction import make_rng
    if spec.get("random"):
        try:
            n, m, r = (int(x) for x in str(spec["random"]).split(","))
        except ValueError:
            raise SpecError(f"/random: expected 'n,m,r', got {spec['random']!r}")
        return random_hypergraph(n, m, r, make_rng(_int(spec, "seed"))), {"random": [n, m, r]}
    a, d, r = _int(spec, "alphabet"), _int(spec, "dimension"), _int(spec, "r")
    edges = collinear_edges(a, d, r, spec["mode"], _budget(spec))
    return Hypergraph(a ** d, tuple(edges), r), {"alphabet": a, "dimension": d}


def cmd_containers(spec: dict):
    from . import containers as C
    from .hypergraph import codegree_scan
    h, where = _grid_hypergraph(spec)
    budget = _budget(spec)
    eps = _f(spec, "eps")
    if spec["iterate"]:
        stop = _int(spec, "stop_size")
        if stop is None:
            raise SpecError("/stop_size: required with --iterate")
        fam = C.iterate_containers(h, _f(spec, "f"), stop, eps, where.get("alphabet"),
                                   where.get("dimension"), budget=budget)
        check = C.verify_containers(h, fam, eps=1, budget=budget)
        check["below_stop_size"] = all(bin(c).count("1") <= stop for c in fam.containers)
        check["ok"] = check["ok"] and check["below_stop_size"]
    else:
        fam = C.build_containers(h, eps, budget=budget)
        check = C.verify_containers(h, fam, eps, tau=_f(spec, "tau"), budget=budget)
    res = {"instance": where, "family": fam.to_json(), "verification": check}
    if spec.get("tau") is not None and h.e():
        res["hypotheses"] = C.check_hypotheses(codegree_scan(h), C.ContainerParams(h.r, _f(spec, "tau"), eps))
    return res, check["ok"]


def cmd_construct(spec: dict):
    from . import construction as K
    cfg = _config(spec)
    res = {"config": cfg.to_json(), "config_hash": cfg.digest()}
    if cfg.a is None or cfg.d is None or cfg.p is None:
        res["note"] = "no desk instance: give --a, --d and --p"
        return res, True
    cleaned = _clean(cfg, _budget(spec))
    res.update(cleaned)
    return res, all(v["certificate"]["ok"] for v in cleaned["passes"].values())


def _config(spec: dict):
    from .construction import derive_params
    regime = spec["regime"]
    scale = {}
    for key in ("n", "r", "f", "k", "gamma"):
        if spec.get(key) is not None:
            scale[key] = _f(spec, key) if key in ("f", "gamma") else _int(spec, key)
    override = {key: spec.get(key) for key in ("a", "d", "r", "p", "t", "T", "seed") if spec.get(key) is not None}
    if "p" in override:
        override["p"] = _f(spec, "p")
    return derive_params(regime, scale, override, _budget(spec))


def _clean(cfg, budget) -> dict:
    """Sample and run the regime's cleaning passes; returns surviving points and certificates."""
    from . import construction as K
    from .grid import AXIS, FULL
    S = K.p_random_subset(cfg.a, cfg.d, cfg.p, cfg.seed, budget)
    out = {"sampled": len(S), "passes": {}}
    axis = cfg.regime in ("weak-net", "cover-decomp")
    c = K.delete_excess_tuples(S, cfg.a, cfg.d, cfg.r, AXIS if axis else FULL, budget)
    out["passes"]["excess"] = {"removed": c.removed, "violating_lines": c.violating_lines_seen,
                               "certificate": c.certificate}
    pts = c.points
    if cfg.regime == "weak-net":
        s = K.star_sparsen(pts, cfg.a, cfg.d, cfg.r, cfg.t or 2)
        out["passes"]["star"] = {"removed": s.removed, "certificate": s.certificate}
        pts = s.points
    if cfg.regime == "cover-decomp":
        hv = K.remove_heavy_points(pts, cfg.a, cfg.d, cfg.r, cfg.T)
        out["passes"]["heavy"] = {"removed": hv.removed, "certificate": hv.certificate}
        pts = hv.points
    out["surviving"] = len(pts)
    out["points"] = [list(p) for p in pts]
    return out


def _grid_points_for(spec: dict):
    from .grid import grid_points
    if spec.get("points"):
        try:
            with open(spec["points"]) as fh:
                return [tuple(int(c) for c in p) for p in json.load(fh)]
        except (OSError, json.JSONDecodeError, TypeError, ValueError) as e:
            raise SpecError(f"{spec['points']}: cannot read a point list ({e})")
    return list(grid_points(_int(spec, "alphabet"), _int(spec, "dimension")))


def cmd_project(spec: dict):
    from .projection import dualize, project_generic
    S = _grid_points_for(spec)
    img, cert = project_generic(S, spec["mode"], _int(spec, "seed"))
    res = {"source": [list(p) for p in S], "image": [p.to_json() for p in img],
           "certificate": cert.to_json()}
    if spec["dual"]:
        res["dual_lines"] = [l.to_json() for l in dualize(img)]
    return res, cert.ok


def cmd_analyze(spec: dict):
    from . import analysis as A
    from .projection import project_generic
    task = spec.get("task") or "general-position"
    if task == "lll":
        res = A.lll_check(_int(spec, "T"), _int(spec, "r"))
        return res, True
    S = _grid_points_for(spec)
    img, cert = project_generic(S, spec["mode"], _int(spec, "seed"))
    res = {"task": task, "points": len(img), "projection": cert.to_json()}
    budget = _budget(spec)
    thr = _int(spec, "threshold")
    eps = _f(spec, "eps")
    if task == "rich-lines":
        rl = A.rich_lines(img, thr)
        res["rich_lines"] = rl.to_json()
        return res, cert.ok
    if task == "general-position":
        gp = A.max_general_position(img, budget=budget)
        res["general_position"] = gp.to_json()
        res["witness_points"] = [list(S[i]) for i in gp.witness]
        ok = not A.has_three_collinear([img[i] for i in gp.witness])
        return res, ok and cert.ok
    if task == "net":
        rep = A.min_hitting_set(img, eps, weak=spec["weak"], projective=spec["projective"],
                                threshold=None if eps is not None else thr, budget=budget)
        res["net"] = rep.to_json()
        return res, rep.verdict and cert.ok
    # two-color on the rich lines of the projected set
    rl = A.rich_lines(img, thr)
    cr = A.two_color_cover(img, [idx for _, idx in rl.lines], budget.search_nodes)
    res["lines"] = len(rl)
    res["coloring"] = cr.to_json()
    res["part1_points"] = [list(S[i]) for i in cr.part1]
    res["part2_points"] = [list(S[i]) for i in cr.part2]
    return res, cr.sat is not None and (not cr.sat or cr.verified)


PIPELINE_DESK = {
    # regime: (a, d, r, p, t, T) used when not overridden
    "gp-3and4": dict(d=3, r=3),
    "eps-net": dict(r=3, n=8, p=Fraction(3, 40)),
    "weak-net": dict(a=5, d=3, r=3, p=Fraction(1, 3), t=2),
    "cover-decomp": dict(a=4, d=3, r=3, p=Fraction(1, 2), T=3, gamma=Fraction(1, 2)),
}


def cmd_pipeline(spec: dict):
    from . import analysis as A
    from .construction import first_moment_check
    from .projection import apply_certificate_map, project_generic
    regime = spec["regime"]
    full = dict(spec)
    for k, v in PIPELINE_DESK[regime].items():
        if full.get(k) is None:
            full[k] = v
    if regime == "gp-3and4":
        full["n"] = full.get("n") or 16
        full["a"] = full.get("a") or full["n"]
    if regime == "eps-net":
        full["a"] = full.get("a") or full["n"]
        full["d"] = full.get("d") or full["r"]
    cfg = _config({**full, "f": None, "k": None})
    if regime == "eps-net" and spec.get("p") is None:
        cfg.notes.append("desk p = 4r/(20n): the formula value leaves too few points at this scale")
    budget = _budget(spec)
    res = {"config": cfg.to_json(), "config_hash": cfg.digest()}
    cleaned = _clean(cfg, budget)
    res["construction"] = {k: v for k, v in cleaned.items() if k != "points"}
    ok = all(v["certificate"]["ok"] for v in cleaned["passes"].values())
    pts = [tuple(p) for p in cleaned["points"]]
    mode = "axis-only" if regime in ("weak-net", "cover-decomp") else "full-line"
    img, cert = project_generic(pts, mode, cfg.seed)
    res["projection"] = cert.to_json()
    ok = ok and cert.ok
    an: dict = {}
    if regime == "gp-3and4":
        gp = A.max_general_position(img, budget=budget)
        an["general_position"] = gp.to_json()
        an["surviving_points"] = len(pts)
        theory = cfg.theory
        an["first_moment_full_scale"] = first_moment_check(
            theory["log2_container_count"]["approx"], theory["stop_size"]["approx"],
            theory["m"]["approx"], theory["p"]["approx"])
        ok = ok and not A.has_three_collinear([img[i] for i in gp.witness])
    elif regime == "eps-net":
        rep = A.min_hitting_set(img, threshold=cfg.r, budget=budget)
        an["strong_net"] = rep.to_json()
        an["complement_has_rich_line"] = A.complement_has_rich_line(img, rep.net, cfg.r)
        ok = ok and rep.verdict and not an["complement_has_rich_line"]
    elif regime == "weak-net":
        from .grid import grid_points
        weak = A.min_hitting_set(img, threshold=cfg.r, weak=True, budget=budget)
        an["weak_net"] = weak.to_json()
        # images of all grid points under the same map classify T_w
        all_grid = list(grid_points(cfg.a, cfg.d))
        sw = A.switching_transform(img, weak.net, cfg.r, apply_certificate_map(cert, all_grid), cfg.t)
        sw["strong_net"] = [p.to_json() for p in sw["strong_net"]]
        an["switching"] = sw
        ok = ok and weak.verdict and sw["passes"]
    else:
        rl = A.rich_lines(img, cfg.r)
        cr = A.two_color_cover(img, [idx for _, idx in rl.lines], budget.search_nodes)
        an["coloring"] = cr.to_json()
        an["incidence_degree"] = A.incidence_degree_check(img, [l for l, _ in rl.lines], cfg.T)
        an["lll"] = A.lll_check(cfg.T, cfg.r)
        ok = ok and cr.sat is not None and (not cr.sat or cr.verified)
    res["analysis"] = an
    return res, ok


COMMANDS = {
    "count": cmd_count, "family": cmd_family, "containers": cmd_containers,
    "construct": cmd_construct, "project": cmd_project, "analyze": cmd_analyze,
    "pipeline": cmd_pipeline,
}


def main(argv: Optional[List[str]] = None) -> int:
    from .report import envelope, write_report
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help(sys.stderr)
        return 2
    started = time.time()
    try:
        spec = resolve(args)
        result, ok = COMMANDS[args.command](spec)
    except SpecError as e:
        print(f"collinear: spec error: {e}", file=sys.stderr)
        return 2
    except (BudgetExceeded, NonContracting, RetryExhausted) as e:
        print(f"collinear: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except (CollinearError, ValueError) as e:
        print(f"collinear: invalid input: {e}", file=sys.stderr)
        return 2
    report = envelope(args.command, spec, result, ok)
    text = write_report(report, args.out, started)
    if not args.out:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
