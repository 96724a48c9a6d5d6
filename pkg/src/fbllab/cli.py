"""Command-line front end.

Every subcommand resolves its flags into a plain parameter dict, runs a
pure function of (parameters, seed), prints a human summary, and appends a
RunRecord line to the JSONL results file.  `replay` re-executes a stored
record and demands bit-identical outputs, which is the determinism
contract for the whole artifact.

Exit codes: 0 success, 1 usage error, 2 verification failure.

A config file (--config) holds `key = value` lines mirroring the long
flag names; explicit flags override it.  The FBLLAB_SEED environment
variable overrides the built-in default seed (but not an explicit --seed).
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__, embed, latexpr, project, renorm
from .errors import FbllabError
from .fblnorm import SearchConfig, gamma_p, rho_estimate
from .lattices import parse_lattice
from .rng import DEFAULT_SEED
from .seqnorm import (AtomicSpace, NormTag, PExponent, WeightedFunction,
                      lorentz_q1_norm, lp_norm, weak_L1_norm, weak_Lr_norm,
                      weak_quasinorm)
from .spaces import FiniteSpace

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip() != ""]


def _parse_kv(spec, prefix):
    """'name:key=v,key=v' -> (name, {key: float})."""
    name, _, rest = spec.partition(":")
    params = {}
    if rest:
        for item in rest.split(","):
            key, _, value = item.partition("=")
            if not key or not value:
                raise ValueError(f"bad {prefix} parameter {item!r} in {spec!r}")
            params[key.strip()] = float(value)
    return name.strip().lower(), params


def parse_space(spec):
    name, kv = _parse_kv(spec, "space")
    d = int(kv.get("d", 0))
    if d < 1:
        raise ValueError(f"space spec {spec!r} needs d=<dim>")
    if name == "l1":
        return FiniteSpace.cross_polytope(d)
    if name == "linf":
        return FiniteSpace.hypercube(d)
    if name == "lq":
        return FiniteSpace.lq(kv["q"], d)
    if name.startswith("l"):
        return FiniteSpace.lq(float(name[1:]), d)
    raise ValueError(f"unknown space family in {spec!r}")


def parse_tag(spec):
    name, kv = _parse_kv(spec, "tag")
    return NormTag(name, p=kv.get("p"), r=kv.get("r"), q=kv.get("q"))


# --- runners: parameters dict -> outputs dict -------------------------------

def run_norm(params):
    values = params["values"]
    weights = params.get("weights") or [1.0] * len(values)
    h = WeightedFunction(tuple(values), AtomicSpace(tuple(weights)))
    kind = params["norm"]
    if kind == "lp":
        value = lp_norm(h, params["p"])
    elif kind == "weak-quasi":
        value = weak_quasinorm(h, PExponent(params["p"]))
    elif kind == "weak-l1":
        value = weak_L1_norm(h, PExponent(params["p"]))
    elif kind == "weak-lr":
        value = weak_Lr_norm(h, PExponent(params["p"]), params["r"])
    elif kind == "lorentz-q1":
        value = lorentz_q1_norm(h, params["q"])
    else:
        raise ValueError(f"unknown norm {kind!r}")
    return {"value": value}


def run_rho(params):
    f = latexpr.parse(params["expr"])
    gens = latexpr.GeneratorAssignment(tuple(map(tuple, params["gens"])))
    E = parse_space(params["space"])
    tag = parse_tag(params["tag"])
    cfg = SearchConfig(n_max=int(params.get("nmax", 4)),
                       restarts=int(params.get("restarts", 24)),
                       iterations=int(params.get("iterations", 80)),
                       seed=int(params["seed"]))
    est = rho_estimate(f, gens, E, tag, cfg)
    return {"value": est.value, "heuristic": est.heuristic,
            "witness": [list(row) for row in est.witness.functionals],
            "trace": list(est.trace)}


def run_certify(params):
    X = parse_lattice(params["lattice"])
    cert = embed.certificate_search(X, np.asarray(params["a"], dtype=float),
                                    C=params["C"], epsilon=params.get("epsilon", 0.01),
                                    seed=int(params["seed"]))
    if cert is None:
        return {"found": False}
    report = embed.certificate_verify(X, cert)
    return {"found": True, "a": list(cert.a), "b": list(cert.b), "d": list(cert.d),
            "C": cert.C, "epsilon": cert.epsilon,
            "worst_margin": report.worst_margin, "pairing": report.pairing}


def run_obstruct(params):
    X = parse_lattice(params["lattice"])
    if params.get("b") and params.get("covers"):
        covers = [tuple(int(i) for i in part.split(","))
                  for part in params["covers"].split(";")]
        ob = embed.cover_obstruction(X, np.asarray(params["b"], dtype=float), covers)
        return {"value": ob.value, "multiplicity": ob.multiplicity,
                "sets": [list(s) for s in ob.sets], "searched": False}
    res = embed.obstruction_search(X, samples=int(params.get("samples", 64)),
                                   seed=int(params["seed"]))
    ob = res.best
    return {"value": ob.value, "multiplicity": ob.multiplicity,
            "sets": [list(s) for s in ob.sets], "b": list(ob.b),
            "n_covers": res.n_covers, "searched": True}


def run_renorm_embed(params):
    data = params["instance"]
    sf = renorm.SimpleFunction(tuple(data["a"]), tuple(data["mu"]))
    emb = renorm.build_renorm_embedding(sf, data["p"], data["r"])
    margin = emb.contraction_margin()
    image = emb.image_norm(np.asarray(data["a"], dtype=float))
    return {"multipliers": list(emb.multipliers), "nu": list(emb.nu.weights),
            "C": emb.C, "contraction_margin": margin, "image_norm": image,
            "ok": bool(margin >= -1e-12 and image >= emb.C ** data["r"] - 1e-9)}


def run_project(params):
    data = params["instance"]
    space = project.LpSumSpace(int(data["blocks"]), int(data["k"]), float(data["p"]))
    vectors = tuple(tuple(map(tuple, np.asarray(v, dtype=float))) for v in data["vectors"])
    c = data.get("c")
    if c is None:
        c = project.exact_lower_constant(np.asarray(data["vectors"], dtype=float),
                                         float(data["p"])) * (1 - 1e-9)
    sys_ = project.DisjointSystem(space, vectors, float(c))
    S = project.build_S_matrix(sys_)
    res = project.find_alpha(S, sys_.c, space.p)
    out = {"c": sys_.c, "feasible": res.feasible}
    if not res.feasible:
        out["separating_direction"] = list(res.witness)
        return out
    P = project.build_projection(sys_, res.alpha)
    rep = project.verify_projection(P, sys_, samples=int(params.get("samples", 300)),
                                    seed=int(params["seed"]))
    out.update({"alpha": list(res.alpha),
                "functional_diagonal": list(P.diagonal),
                "positive": rep.positive, "idempotent": rep.idempotent,
                "fixes": rep.fixes, "norm_estimate": rep.norm_estimate,
                "norm_bound": rep.norm_bound, "norm_ok": rep.norm_ok,
                "all_ok": rep.all_ok})
    return out


def run_schreier(params):
    n_max = int(params["nmax"])
    p = float(params["p"])
    trunc = project.schreier_sets(n_max)
    rng = np.random.default_rng(int(params["seed"]))
    samples = int(params.get("samples", 100))
    upper_ok = lower_ok = 0
    for _ in range(samples):
        a = rng.standard_normal(n_max) * rng.uniform(0.5, 2.0)
        rep = project.schreier_embedding_check(a, trunc, p)
        upper_ok += rep.upper_ok
        lower_ok += rep.lower_ok
    threshold = 1.0 / (PExponent(p).conjugate * 2.0 ** (1.0 / PExponent(p).conjugate))
    return {"count": trunc.count, "samples": samples, "upper_ok": upper_ok,
            "lower_ok": lower_ok, "lower_threshold": threshold,
            "all_ok": bool(upper_ok == samples and lower_ok == samples)}


def run_constants(params):
    ps = params.get("p_values") or [params["p"]]
    rows = []
    for p in ps:
        pc = PExponent(p).conjugate
        bound = (3.0 * 2.0 ** pc / (2.0 * (1.0 + 2.0 ** pc))) ** (1.0 / pc)
        rows.append({"p": p, "gamma": gamma_p(p), "x3_bound": bound})
    return {"rows": rows}


RUNNERS = {
    "norm": run_norm,
    "rho": run_rho,
    "certify": run_certify,
    "obstruct": run_obstruct,
    "renorm-embed": run_renorm_embed,
    "project": run_project,
    "schreier": run_schreier,
    "constants": run_constants,
}


# --- records, emitters -------------------------------------------------------

def _canonical(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def append_record(path, record):
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(_canonical(record) + "\n")


def write_csv(path, rows):
    import csv
    rows = list(rows)
    if not rows:
        return
    keys = sorted({k for row in rows for k in row})
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=keys)
        writer.writeheader()
        writer.writerows(rows)


def write_svg(path, xs, series, title, width=640, height=400):
    """A dependency-free line plot with deterministic bytes."""
    pad = 50
    xs = list(map(float, xs))
    all_y = [y for ys in series.values() for y in ys]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(all_y), max(all_y)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def sx(x):
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(y):
        return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<text x="{width/2:.1f}" y="20" text-anchor="middle" '
             f'font-family="monospace" font-size="14">{title}</text>',
             f'<rect x="{pad}" y="{pad}" width="{width-2*pad}" height="{height-2*pad}" '
             'fill="none" stroke="#888"/>']
    for (label, ys), color in zip(series.items(), colors):
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{width-pad+4}" y="{sy(ys[-1]):.2f}" font-family="monospace" '
                     f'font-size="11" fill="{color}">{label}</text>')
    for val, anchor, tx, ty in ((x0, "middle", sx(x0), height - pad + 16),
                                (x1, "middle", sx(x1), height - pad + 16),
                                (y0, "end", pad - 4, sy(y0)),
                                (y1, "end", pad - 4, sy(y1))):
        parts.append(f'<text x="{tx:.1f}" y="{ty:.1f}" text-anchor="{anchor}" '
                     f'font-family="monospace" font-size="11">{val:.4g}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")


# --- argument plumbing --------------------------------------------------------

def _load_config(path):
    values = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            if not _:
                raise ValueError(f"config line without '=': {line!r}")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _default_seed():
    env = os.environ.get("FBLLAB_SEED")
    return int(env) if env else DEFAULT_SEED


def build_parser():
    top = _Parser(prog="fbllab", description=__doc__,
                  formatter_class=argparse.RawDescriptionHelpFormatter)
    top.add_argument("--version", action="version", version=__version__)
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="master seed (default: FBLLAB_SEED or built-in)")
    common.add_argument("--config", help="key=value file of flag defaults")
    common.add_argument("--results", default="fbllab-results.jsonl",
                        help="JSONL file the run record is appended to")
    common.add_argument("--csv", help="optional CSV table output")
    common.add_argument("--svg", help="optional SVG plot output")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", parents=[common], help="sequence norms on atomic spaces")
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--weights", help="comma-separated atom masses (default counting)")
    p.add_argument("--norm", required=True,
                   choices=["lp", "weak-quasi", "weak-l1", "weak-lr", "lorentz-q1"])
    p.add_argument("--p", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--q", type=float)

    p = sub.add_parser("rho", parents=[common], help="free-lattice norm lower bound")
    p.add_argument("--expr", required=True, help="lattice expression, e.g. '|d1| /\\ d2'")
    p.add_argument("--gens", required=True, help="JSON matrix of generator coordinates")
    p.add_argument("--space", required=True, help="l1:d=2 | linf:d=3 | lq:q=2,d=2")
    p.add_argument("--tag", required=True, help="lp:p=2 | weak-l1:p=2 | weak-lr:p=2,r=1.5")
    p.add_argument("--nmax", type=int, default=4)
    p.add_argument("--restarts", type=int, default=24)
    p.add_argument("--iterations", type=int, default=80)

    p = sub.add_parser("certify", parents=[common], help="embedding certificate search")
    p.add_argument("--lattice", required=True, help="X3:p=2 | lp:p=2,n=3 | weaklp:p=2,n=4")
    p.add_argument("--a", required=True, help="comma-separated non-negative vector")
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--epsilon", type=float, default=0.01)

    p = sub.add_parser("obstruct", parents=[common], help="cover obstruction / search")
    p.add_argument("--lattice", required=True)
    p.add_argument("--b", help="dual vector (with --covers: exact evaluation)")
    p.add_argument("--covers", help="semicolon-separated index lists, e.g. '0,1;0,2;1,2'")
    p.add_argument("--samples", type=int, default=64)

    p = sub.add_parser("renorm-embed", parents=[common],
                       help="weak-Lr -> weak-L1 contraction from a simple function")
    p.add_argument("--json", required=True,
                   help='{"a": [...], "mu": [...], "p": 2, "r": 1.5} or @file')

    p = sub.add_parser("project", parents=[common],
                       help="positive projection onto a disjoint system")
    p.add_argument("--json", required=True,
                   help='{"blocks","k","p","vectors",["c"]} or @file')
    p.add_argument("--samples", type=int, default=300)

    p = sub.add_parser("schreier", parents=[common], help="Schreier family checks")
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--samples", type=int, default=100)

    p = sub.add_parser("constants", parents=[common], help="closed-form constants")
    p.add_argument("--p", type=float)
    p.add_argument("--pmin", type=float)
    p.add_argument("--pmax", type=float)
    p.add_argument("--steps", type=int, default=33)

    p = sub.add_parser("replay", parents=[common], help="re-run a stored record")
    p.add_argument("--record", required=True, help="JSONL file holding RunRecords")
    p.add_argument("--line", type=int, default=0, help="1-based line (default: last)")
    return top


def _json_arg(text):
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            return json.load(fh)
    return json.loads(text)


def _resolve(args, argv):
    """Apply config-file values to flags not given on the command line."""
    if getattr(args, "config", None):
        explicit = {tok.split("=", 1)[0].lstrip("-").replace("-", "_")
                    for tok in argv if tok.startswith("--")}
        for key, raw in _load_config(args.config).items():
            if hasattr(args, key) and key not in explicit:
                setattr(args, key, _coerce(raw))
    if getattr(args, "seed", None) is None:
        args.seed = _default_seed()
    return args


def _coerce(raw):
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        return raw


def _collect_params(args):
    cmd = args.command
    if cmd == "norm":
        params = {"values": _floats(args.values),
                  "weights": _floats(args.weights) if args.weights else None,
                  "norm": args.norm, "p": args.p, "r": args.r, "q": args.q}
    elif cmd == "rho":
        params = {"expr": args.expr, "gens": json.loads(args.gens),
                  "space": args.space, "tag": args.tag, "nmax": args.nmax,
                  "restarts": args.restarts, "iterations": args.iterations}
    elif cmd == "certify":
        params = {"lattice": args.lattice, "a": _floats(args.a),
                  "C": args.C, "epsilon": args.epsilon}
    elif cmd == "obstruct":
        params = {"lattice": args.lattice, "samples": args.samples,
                  "b": _floats(args.b) if args.b else None, "covers": args.covers}
    elif cmd in ("renorm-embed", "project"):
        params = {"instance": _json_arg(args.json)}
        if cmd == "project":
            params["samples"] = args.samples
    elif cmd == "schreier":
        params = {"nmax": args.nmax, "p": args.p, "samples": args.samples}
    elif cmd == "constants":
        if args.pmin is not None and args.pmax is not None:
            ps = list(np.linspace(args.pmin, args.pmax, args.steps))
        elif args.p is not None:
            ps = [args.p]
        else:
            raise ValueError("constants needs --p or --pmin/--pmax")
        params = {"p": ps[0], "p_values": ps}
    else:
        raise ValueError(f"no parameter collector for {cmd!r}")
    params["seed"] = args.seed
    return params


def _summarize(cmd, outputs):
    if cmd == "norm":
        return f"{outputs['value']:.7f}"
    if cmd == "rho":
        tagline = " (heuristic)" if outputs["heuristic"] else ""
        return f"value {outputs['value']:.7f}{tagline}"
    if cmd == "certify":
        if not outputs["found"]:
            return "Infeasible"
        return (f"certificate found: C={outputs['C']}, pairing={outputs['pairing']:.6f}, "
                f"worst margin={outputs['worst_margin']:.3e}")
    if cmd == "obstruct":
        return f"C >= {outputs['value']:.7f} via {len(outputs['sets'])} sets (l={outputs['multiplicity']})"
    if cmd == "renorm-embed":
        return (f"C={outputs['C']:.7f} margin={outputs['contraction_margin']:.3e} "
                f"|Sf|={outputs['image_norm']:.7f} ok={outputs['ok']}")
    if cmd == "project":
        if not outputs["feasible"]:
            return "Infeasible (claimed constant refuted)"
        return (f"projection ok={outputs['all_ok']} norm {outputs['norm_estimate']:.4f} "
                f"<= bound {outputs['norm_bound']:.4f}")
    if cmd == "schreier":
        return (f"{outputs['count']} sets; upper {outputs['upper_ok']}/{outputs['samples']}, "
                f"lower {outputs['lower_ok']}/{outputs['samples']}")
    if cmd == "constants":
        row = outputs["rows"][0]
        return f"gamma={row['gamma']:.7f}, X3-bound C >= {row['x3_bound']:.7f}"
    return _canonical(outputs)


def _emit(args, cmd, params, outputs):
    if getattr(args, "csv", None):
        rows = outputs.get("rows") or [
            {k: v for k, v in outputs.items() if isinstance(v, (int, float, bool, str))}]
        write_csv(args.csv, rows)
    if getattr(args, "svg", None):
        rows = outputs.get("rows")
        if rows and len(rows) > 1:
            xs = [row["p"] for row in rows]
            series = {"gamma_p": [row["gamma"] for row in rows],
                      "X3 bound": [row["x3_bound"] for row in rows]}
            write_svg(args.svg, xs, series, "constants vs p")
        else:
            print("svg: nothing to plot for this run", file=sys.stderr)


def _verification_failed(cmd, outputs):
    if cmd == "certify":
        return not outputs["found"]
    if cmd == "project":
        return not outputs.get("all_ok", outputs["feasible"])
    if cmd == "renorm-embed":
        return not outputs["ok"]
    if cmd == "schreier":
        return not outputs["all_ok"]
    return False


def main(argv=None):
    if argv is None:
        argv = sys.argv[1:]
    args = build_parser().parse_args(argv)
    try:
        args = _resolve(args, argv)
        if args.command == "replay":
            return _replay(args)
        params = _collect_params(args)
        runner = RUNNERS[args.command]
        start = time.perf_counter()
        outputs = runner(params)
        wall = time.perf_counter() - start
        record = {"command": args.command, "parameters": params, "seed": args.seed,
                  "outputs": outputs, "wall_time_s": wall, "version": __version__}
        append_record(args.results, record)
        print(_summarize(args.command, outputs))
        _emit(args, args.command, params, outputs)
        return EXIT_VERIFY if _verification_failed(args.command, outputs) else EXIT_OK
    except (FbllabError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _replay(args):
    with open(args.record, encoding="utf-8") as fh:
        lines = [line for line in fh if line.strip()]
    if not lines:
        print("error: empty record file", file=sys.stderr)
        return EXIT_USAGE
    index = args.line - 1 if args.line else len(lines) - 1
    record = json.loads(lines[index])
    runner = RUNNERS[record["command"]]
    outputs = runner(record["parameters"])
    if _canonical(outputs) == _canonical(record["outputs"]):
        print(f"replay OK: {record['command']} reproduced bit-identically")
        return EXIT_OK
    print("replay MISMATCH:")
    print("  stored:   " + _canonical(record["outputs"]))
    print("  replayed: " + _canonical(outputs))
    return EXIT_VERIFY


if __name__ == "__main__":
    raise SystemExit(main())
