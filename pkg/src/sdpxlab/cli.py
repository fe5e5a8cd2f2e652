"""Single executable wiring all modules: gen, solve, color, nn-forward,
verify, bench.

Exit codes: 0 success, 1 verification failure, 2 usage error.  Output is
line-oriented ``key=value`` pairs on stdout; ``--json`` flags write
machine-readable side files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import verify
from .colors import Algo, run_to_stable
from .core import SdpxlabError, SolutionTriple
from .nn import Arch, decode, forward
from .pdhg import PdhgConfig, solve, solve_continuation, warm_start_solve
from .relaxations import (
    er_graph,
    lmi_sdp,
    max2sat_sdp,
    maxclique_sdp,
    maxcut_sdp,
    mis_sdp,
    random_clauses,
    regular_graph,
    vertexcover_sdp,
)
from .sdpa import read_sdpa, write_sdpa

USAGE_ERROR = 2
VERIFY_FAILURE = 1

_ALGO_FLAGS = {a.value: a for a in Algo}
_ARCH_FLAGS = {a.value: a for a in Arch}


class _CliParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit2(message)


class SystemExit2(SdpxlabError):
    """Usage error carrying exit code 2."""


def _read_instance(path: str):
    p = Path(path)
    if not p.exists():
        raise SystemExit2(f"input file not found: {path}")
    return read_sdpa(p.read_text())


def _kv(**kwargs):
    print(" ".join(f"{k}={v}" for k, v in kwargs.items()))


def _write_json(path: str | None, payload):
    if path:
        Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def _build_parser() -> _CliParser:
    parser = _CliParser(prog="sdpxlab")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[], help="generate an instance")
    p.add_argument("--problem", required=True,
                   choices=["maxcut", "clique", "mis", "vc", "max2sat", "lmi"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--clauses", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("solve", help="solve an instance")
    p.add_argument("file")
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iters", type=int, default=20000)
    p.add_argument("--warm-start", default=None)
    p.add_argument("--json", dest="json_out", default=None)

    p = sub.add_parser("color", help="run color refinement")
    p.add_argument("file")
    p.add_argument("--algo", default="vc2fwl", choices=sorted(_ALGO_FLAGS))
    p.add_argument("--max-rounds", type=int, default=None)
    p.add_argument("--json", dest="json_out", default=None)

    p = sub.add_parser("nn-forward", help="run a forward pass")
    p.add_argument("file")
    p.add_argument("--arch", required=True, choices=sorted(_ARCH_FLAGS))
    p.add_argument("--layers", type=int, default=3)
    p.add_argument("--dim", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--check", default=None,
                   choices=["equivariance", "symmetry", "coloring"])

    p = sub.add_parser("verify", help="run the verification harness")
    p.add_argument("--case", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", dest="json_out", default=None)

    p = sub.add_parser("bench", help="cold vs warm solves over sizes")
    p.add_argument("--problem", default="maxcut", choices=["maxcut"])
    p.add_argument("--sizes", default="10,20,40")
    p.add_argument("--seed", type=int, default=0)
    return parser


def _cmd_gen(args) -> int:
    if args.n < 1:
        raise SystemExit2(f"--n must be >= 1, got {args.n}")
    if args.p is not None and not 0 <= args.p <= 1:
        raise SystemExit2(f"--p must be in [0,1], got {args.p}")
    if args.problem == "lmi":
        inst = lmi_sdp(args.n, args.m if args.m is not None else args.n, args.seed)
    elif args.problem == "max2sat":
        k = args.clauses if args.clauses is not None else 2 * args.n
        inst = max2sat_sdp(random_clauses(args.n, k, args.seed))
    else:
        if args.d is not None:
            g = regular_graph(args.n, args.d, args.seed)
        else:
            g = er_graph(args.n, args.p if args.p is not None else 0.5, args.seed)
        builder = {"maxcut": maxcut_sdp, "clique": maxclique_sdp,
                   "mis": mis_sdp, "vc": vertexcover_sdp}[args.problem]
        inst = builder(g)
    Path(args.output).write_text(write_sdpa(inst))
    _kv(event="gen", problem=args.problem, n=inst.n, m=inst.m, out=args.output)
    return 0


def _solution_payload(triple: SolutionTriple, stats) -> dict:
    payload = stats.to_json_dict()
    payload["X"] = triple.X.tolist()
    payload["y"] = triple.y.tolist()
    return payload


def _cmd_solve(args) -> int:
    if args.tol <= 0 or args.max_iters < 1:
        raise SystemExit2("--tol must be > 0 and --max-iters >= 1")
    inst = _read_instance(args.file)
    cfg = PdhgConfig(eps=args.eps if args.eps is not None else 1e-6,
                     tol=args.tol, max_iters=args.max_iters)
    if args.warm_start:
        p = Path(args.warm_start)
        if not p.exists():
            raise SystemExit2(f"warm-start file not found: {args.warm_start}")
        data = json.loads(p.read_text())
        X0 = np.array(data["X"])
        y0 = np.array(data.get("y", np.zeros(inst.m)))
        triple, stats = warm_start_solve(inst, X0, y0, cfg)
    elif args.eps is None:
        triple, stages = solve_continuation(inst, cfg)
        stats = stages[-1]
        stats.iterations = sum(s.iterations for s in stages)
        stats.converged = all(s.converged for s in stages)
    else:
        triple, stats = solve(inst, cfg)
    _kv(event="solve", file=args.file, iterations=stats.iterations,
        converged=str(stats.converged).lower(),
        objective=f"{stats.objective:.12g}",
        primal=f"{stats.primal_res:.3e}", dual=f"{stats.dual_res:.3e}")
    _write_json(args.json_out, _solution_payload(triple, stats))
    return 0


def _cmd_color(args) -> int:
    if args.max_rounds is not None and args.max_rounds < 1:
        raise SystemExit2("--max-rounds must be >= 1")
    inst = _read_instance(args.file)
    part, rounds = run_to_stable(_ALGO_FLAGS[args.algo], inst, args.max_rounds)
    _kv(event="color", file=args.file, algo=args.algo, rounds=rounds,
        var_classes=part.n_var_classes, con_classes=part.n_con_classes)
    _write_json(args.json_out, part.to_json_dict())
    return 0


def _cmd_nn(args) -> int:
    if args.layers < 0 or args.dim < 1:
        raise SystemExit2("--layers must be >= 0 and --dim >= 1")
    inst = _read_instance(args.file)
    arch = _ARCH_FLAGS[args.arch]
    if args.check == "symmetry":
        dev = verify.nn_symmetry_deviation(arch, inst, args.dim, args.layers, args.seed)
        ok = dev <= 1e-12
        _kv(event="nn_check", check="symmetry", deviation=f"{dev:.3e}",
            ok=str(ok).lower())
        return 0 if ok else VERIFY_FAILURE
    if args.check == "equivariance":
        dev = verify.nn_equivariance_deviation(arch, inst, args.dim, args.layers,
                                               args.seed)
        ok = dev <= 1e-9
        _kv(event="nn_check", check="equivariance", deviation=f"{dev:.3e}",
            ok=str(ok).lower())
        return 0 if ok else VERIFY_FAILURE
    if args.check == "coloring":
        ok = verify.nn_coloring_respect(arch, inst, args.dim, args.layers, args.seed)
        _kv(event="nn_check", check="coloring", ok=str(ok).lower())
        return 0 if ok else VERIFY_FAILURE
    states, params = forward(arch, inst, args.dim, args.layers, args.seed)
    pred = decode(states[-1], params)
    _kv(event="nn_forward", arch=args.arch, layers=args.layers, dim=args.dim,
        seed=args.seed, embedding_norm=f"{float(np.linalg.norm(states[-1].var)):.12g}",
        prediction_norm=f"{float(np.linalg.norm(pred)):.12g}")
    return 0


def _threads() -> int:
    raw = os.environ.get("SDPXLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _cmd_verify(args) -> int:
    case_ids = verify.CASE_IDS if args.case is None else (args.case,)
    for cid in case_ids:
        if cid not in verify.CASE_IDS:
            raise SystemExit2(
                f"unknown case {cid!r}; known: {', '.join(verify.CASE_IDS)}")
    workers = min(_threads(), len(case_ids))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            grouped = list(pool.map(lambda c: verify.run_case(c, args.seed), case_ids))
    else:
        grouped = [verify.run_case(c, args.seed) for c in case_ids]
    reports = [r for group in grouped for r in group]
    for r in reports:
        _kv(event="case", case=r.case_id, **{"pass": str(r.passed).lower()})
    ok = all(r.passed for r in reports)
    _kv(event="verify", cases=len(reports), ok=str(ok).lower())
    _write_json(args.json_out, [r.to_json_dict() for r in reports])
    return 0 if ok else VERIFY_FAILURE


def _cmd_bench(args) -> int:
    try:
        sizes = [int(tok) for tok in args.sizes.split(",") if tok]
    except ValueError:
        raise SystemExit2(f"bad --sizes value: {args.sizes!r}") from None
    rng = np.random.default_rng(args.seed)
    for size in sizes:
        inst = maxcut_sdp(er_graph(size, 0.3, args.seed + size))
        cfg = PdhgConfig()
        t0 = time.perf_counter()
        triple, stats = solve(inst, cfg)
        cold_time = time.perf_counter() - t0
        noise = rng.standard_normal(triple.X.shape)
        X0 = triple.X + 1e-3 * (noise + noise.T) / 2.0
        t0 = time.perf_counter()
        _, wstats = warm_start_solve(inst, X0, triple.y, cfg)
        warm_time = time.perf_counter() - t0
        _kv(event="bench", problem=args.problem, size=size,
            cold_iters=stats.iterations, cold_seconds=f"{cold_time:.3f}",
            warm_iters=wstats.iterations, warm_seconds=f"{warm_time:.3f}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {"gen": _cmd_gen, "solve": _cmd_solve, "color": _cmd_color,
                   "nn-forward": _cmd_nn, "verify": _cmd_verify,
                   "bench": _cmd_bench}[args.command]
        return handler(args)
    except SystemExit2 as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except SystemExit as exc:
        # argparse exits with code 2 on usage errors
        return int(exc.code) if exc.code is not None else 0
    except SdpxlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
