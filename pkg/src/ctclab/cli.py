"""Batch command-line front end.

Every subcommand reads a JSON spec (``--in``) and writes JSON or CSV
(``--out``, default stdout).  Exit status is 0 on success, 1 for contract or
solver failures and 2 for I/O or usage errors; failures print a JSON object
on stderr.
"""

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__, correlations, dctc, extension, gibbs
from .errors import CTCLabError
from .linalg import make_rng, matrix_from_json, matrix_to_json


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _clean(obj):
    # JSON has no infinities or NaN; emit them as strings
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return _clean(obj.item())
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj):
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _read_json(path):
    if path is None:
        raise UsageError("--in is required for this subcommand")
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _write(args, text):
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_dctc_solve(args):
    ch = dctc.channel_from_json(_read_json(args.infile))
    res = dctc.solve_fixed_points(ch, tol=args.tol or 1e-10)
    return dumps(res.to_json())


def cmd_dctc_iterate(args):
    spec = _read_json(args.infile)
    ch = dctc.channel_from_json(spec)
    N = int(args.steps or spec.get("N", 1000))
    rho0 = spec.get("rhoB0")
    rho0 = np.eye(ch.space.dimB) / ch.space.dimB if rho0 is None else matrix_from_json(rho0)
    avg, _ = dctc.cesaro_iterate(ch, rho0, N, keep_orbit=False)
    return dumps({"N": N, "average": matrix_to_json(avg), "residual": dctc.verify_dctc(ch, avg)})


def cmd_extend_run(args):
    spec = _read_json(args.infile)
    if args.seed is not None:
        spec["seed"] = args.seed
    rows = extension.run_spec(spec)
    return csv_text(["N", "maxDelta", "bound", "marginalResidual"], rows)


def _corr_one(job):
    seed, dims, grid, tol, spec = job
    rng = make_rng(seed)
    if spec is None:
        inst = correlations.random_instance(rng, dims)
    else:
        inst = correlations.instance_from_json(spec, rng)
    rep = correlations.verify_lemma(inst, tol=tol, phaseGridSize=grid)
    out = rep.to_json()
    out["seed"] = seed
    return out


def cmd_corr_verify(args):
    spec = _read_json(args.infile) if args.infile else None
    grid = args.phase_grid
    tol = args.tol or 1e-3
    base = 0 if args.seed is None else args.seed
    if spec is not None:
        jobs = [(int(spec.get("seed", base)), None, grid, tol, spec)]
    else:
        # one independent stream per instance, so results do not depend on --jobs
        seeds = np.random.SeedSequence(base).generate_state(args.count, dtype=np.uint64)
        dims = tuple(int(d) for d in args.dims.split(","))
        jobs = [(int(s), dims, grid, tol, None) for s in seeds]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            reports = list(pool.map(_corr_one, jobs))
    else:
        reports = [_corr_one(j) for j in jobs]
    return dumps({"reports": reports, "allPassed": all(r["passed"] for r in reports)})


def _politzer():
    from . import politzer

    return politzer


def cmd_politzer_trace(args):
    pz = _politzer()
    spec = _read_json(args.infile)
    geom = pz.PolitzerGeometry.from_json(spec)
    t, x = spec["point"]
    tr = pz.trace_characteristic(
        geom, (t, x), spec.get("chirality", "R"), spec.get("direction", "backward"),
        side=int(spec.get("side", 0)), horizon=spec.get("horizon"),
    )
    return csv_text(["t", "x", "segmentId"], tr.polyline_rows())


def cmd_politzer_eval(args):
    pz = _politzer()
    spec = _read_json(args.infile)
    field = pz.field_from_json(spec)
    if "points" in spec:
        rows = []
        for p in spec["points"]:
            side = int(p[2]) if len(p) > 2 else 0
            pol, mink, displaced = pz.minkowski_compare(field, (p[0], p[1]), side)
            rows.append((float(p[0]), float(p[1]), pol, mink, int(displaced)))
        return csv_text(["t", "x", "value", "minkowski", "displaced"], rows)
    rng = make_rng(0 if args.seed is None else args.seed)
    n = int(spec.get("rimSamples", 1000))
    xs = rng.uniform(-field.geometry.L, field.geometry.L, n)
    rep = pz.rim_check(field, xs, float(spec.get("eps", 1e-6)))
    return dumps(rep.to_json())


def cmd_politzer_region(args):
    pz = _politzer()
    spec = _read_json(args.infile)
    geom = pz.PolitzerGeometry.from_json(spec)
    regions = [pz.region_from_json(r) for r in spec["regions"]]
    tol = args.tol or 1e-9
    locs = [pz.localization(geom, r).to_json() for r in regions]
    equal = [[pz.regions_equal(geom, a, b, tol) for b in regions] for a in regions]
    return dumps({"localizations": locs, "equal": equal})


def cmd_politzer_symplectic(args):
    pz = _politzer()
    spec = _read_json(args.infile)
    f, g = (pz.field_from_json(obj) for obj in spec["fields"])
    sigma = pz.symplectic_form(f, g, spec.get("tSurface"))
    return dumps({"sigma": sigma})


def cmd_gibbs_scan(args):
    spec = _read_json(args.infile) if args.infile else {}
    betas = spec.get("betas")
    if args.betas:
        betas = [float(b) for b in args.betas.split(",")]
    if betas is None:
        betas = [1.0, 0.1, 0.01, 0.001, 1e-4]
    k = int(args.k or spec.get("k", 1))
    truncation = args.truncation or spec.get("truncation")
    p = gibbs.lowest_levels_projector(k)
    rows = []
    for beta in betas:
        g = gibbs.OscillatorGibbs(beta, truncation)
        rows.append((float(beta), float(gibbs.gibbs_expectation(g, p, args.tol or 1e-12)), k / g.Z))
    return csv_text(["beta", "omega", "bound"], rows)


COMMANDS = {
    ("dctc", "solve"): cmd_dctc_solve,
    ("dctc", "iterate"): cmd_dctc_iterate,
    ("extend", "run"): cmd_extend_run,
    ("corr", "verify"): cmd_corr_verify,
    ("politzer", "trace"): cmd_politzer_trace,
    ("politzer", "eval"): cmd_politzer_eval,
    ("politzer", "region"): cmd_politzer_region,
    ("politzer", "symplectic"): cmd_politzer_symplectic,
    ("gibbs", "scan"): cmd_gibbs_scan,
}


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--in", dest="infile", help="input JSON spec")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--seed", type=int, help="RNG seed (PCG64)")
    common.add_argument("--tol", type=float, help="tolerance override")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for batches")

    parser = _Parser(prog="ctclab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ctclab {__version__}")
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)
    subs = {}
    for group, action in COMMANDS:
        if group not in subs:
            gp = groups.add_parser(group)
            subs[group] = gp.add_subparsers(dest="action", required=True, parser_class=_Parser)
        sp = subs[group].add_parser(action, parents=[common])
        if (group, action) == ("dctc", "iterate"):
            sp.add_argument("--steps", type=int, help="number of iterates N")
        elif (group, action) == ("corr", "verify"):
            sp.add_argument("--phase-grid", type=int, default=256)
            sp.add_argument("--count", type=int, default=1, help="random instances without --in")
            sp.add_argument("--dims", default="2,2,2")
        elif (group, action) == ("gibbs", "scan"):
            sp.add_argument("--betas", help="comma-separated descending inverse temperatures")
            sp.add_argument("--k", type=int, help="rank of the lowest-levels projector")
            sp.add_argument("--truncation", type=int, help="levels kept")
    return parser


def _fail(kind, message, code):
    sys.stderr.write(json.dumps({"error": kind, "message": message}, sort_keys=True) + "\n")
    return code


def run(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if args.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        text = COMMANDS[(args.group, args.action)](args)
        _write(args, text)
    except UsageError as exc:
        return _fail("usage", str(exc), 2)
    except json.JSONDecodeError as exc:
        return _fail("io", f"malformed JSON: {exc}", 2)
    except OSError as exc:
        return _fail("io", str(exc), 2)
    except CTCLabError as exc:
        return _fail(exc.kind, str(exc), 1)
    except (KeyError, TypeError, ValueError) as exc:
        return _fail("contract", f"invalid input: {exc!r}", 1)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
