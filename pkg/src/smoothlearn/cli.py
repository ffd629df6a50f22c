"""Command-line harness wiring games, dynamics, analysis, and reports.

Four subcommands: ``simulate`` runs a learning algorithm on a game and writes
per-step CSVs, a summary JSON, and trace figures; ``analyze`` emits the
certificate bundle for a game; ``scan`` compares certified ratios against
equilibrium welfare over random games; ``examples`` runs the full
reproduction suite. Exit codes: 0 success, 1 a reproduction criterion failed,
2 bad input.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import json
import os
import sys

from .bayesian import agent_form, bayesian_from_dict
from .catalog import BUILTIN_NAMES, builtin_default_init, builtin_game
from .dynamics import CgdSchedule, run_cgd, run_ogd, trajectory_to_csv
from .equilibria import poa
from .errors import SmoothlearnError
from .games import (
    Game,
    constant_sum_value,
    eliminate_dominated,
    game_from_dict,
    lipschitz_bound,
    optimal_welfare,
    random_game,
    sensitivity,
)
from .metrics import (
    avg_cce_gap,
    best_iterate,
    metrics_to_csv,
    negap_trace,
    regrets,
    rvu_audit,
    welfare_trace,
)
from .smoothness import minty_certificate, rpoa, weighted_rpoa


def thread_budget() -> int:
    raw = os.environ.get("SMOOTHLEARN_THREADS", "")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise SmoothlearnError(
                f"SMOOTHLEARN_THREADS must be an integer, got {raw!r}"
            ) from None
    return min(4, os.cpu_count() or 1)


def resolve_game(source: str, seed: int) -> tuple[Game, list | None, dict]:
    """Turn a --game argument into a game: a builtin name, a seeded
    ``random:RxC`` shape, or a JSON file; incomplete-information files reduce
    to their agent form."""
    info: dict = {"source": source}
    if source in BUILTIN_NAMES:
        return builtin_game(source), builtin_default_init(source), info
    if source.startswith("random:"):
        try:
            counts = [int(v) for v in source.split(":", 1)[1].split("x")]
        except ValueError:
            raise SmoothlearnError(
                f"bad random shape {source!r}; expected e.g. random:3x3"
            ) from None
        info["seed"] = seed
        return random_game(len(counts), counts, seed=seed), None, info
    if not os.path.exists(source):
        raise SmoothlearnError(
            f"no such game: {source!r} is neither a file, a builtin "
            f"({', '.join(BUILTIN_NAMES)}), nor a random:RxC shape"
        )
    with open(source) as fh:
        data = json.load(fh)
    if data.get("kind") == "bayesian":
        game = agent_form(bayesian_from_dict(data))
        info["agent_form_of"] = source
        return game, None, info
    return game_from_dict(data), None, info


def _write_json(data: dict, path: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(args) -> int:
    game, default_init, info = resolve_game(args.game, args.seed)
    lipschitz = lipschitz_bound(game)
    if args.eta == "auto":
        eta = 1.0 / (4.0 * lipschitz) if args.alg == "ogd" else 1.0 / (2.0 * lipschitz)
    else:
        try:
            eta = float(args.eta)
        except ValueError:
            raise SmoothlearnError(f"eta must be a number or 'auto', got {args.eta!r}")
    if args.steps < 0:
        raise SmoothlearnError("steps must be >= 0")

    if args.alg == "ogd":
        traj = run_ogd(game, eta=eta, steps=args.steps, init=default_init)
    else:
        traj = run_cgd(game, CgdSchedule(eta=eta), steps=args.steps, init=default_init)

    os.makedirs(args.out, exist_ok=True)
    trajectory_to_csv(traj, os.path.join(args.out, "trajectory.csv"))
    metrics_to_csv(game, traj, os.path.join(args.out, "metrics.csv"))

    summary = {
        "game": info,
        "algorithm": args.alg,
        "eta": eta,
        "eta_source": args.eta,
        "lipschitz_bound": lipschitz,
        "steps": args.steps,
        "seed": args.seed,
    }
    if traj.steps > 0:
        gaps = negap_trace(traj)
        t_star, best_sq = best_iterate(traj)
        report = regrets(game, traj)
        _, running = welfare_trace(game, traj)
        summary.update(
            {
                "min_negap": float(gaps.min()),
                "final_negap": float(gaps[-1]),
                "best_iterate": t_star,
                "best_iterate_squared_gap_sum": best_sq,
                "sum_regret": report.total,
                "avg_cce_gap": avg_cce_gap(game, traj),
                "final_sw_running_avg": float(running[-1]),
            }
        )
        if traj.kind == "ogd":
            audit = rvu_audit(traj)
            summary["rvu_min_slack"] = float(audit.per_player_slack.min())
        else:
            summary["max_fixed_point_residual"] = float(traj.residuals.max())
        if not args.no_figures:
            from .report import save_trajectory_figures

            summary["figures"] = save_trajectory_figures(game, traj, args.out)
    _write_json(summary, os.path.join(args.out, "summary.json"))
    print(f"wrote trajectory.csv, metrics.csv, summary.json to {args.out}")
    print(f"eta resolved to {eta:g} (L bound {lipschitz:g})")
    if traj.steps > 0:
        print(f"min gap {summary['min_negap']:.6g} at best iterate t*={summary['best_iterate']}")
    return 0


# ---------------------------------------------------------------------------
# analyze


def cmd_analyze(args) -> int:
    game, _, info = resolve_game(args.game, args.seed)
    opt, ties = optimal_welfare(game)
    cert = rpoa(game, z_min=args.z_min)
    weighted = weighted_rpoa(game, ratio_bound=args.ratio_bound)
    minty = minty_certificate(game)
    reduced, removed, kept = eliminate_dominated(game)
    out = {
        "game": info,
        "players": game.n,
        "actions": list(game.actions),
        "constant_sum": constant_sum_value(game),
        "opt": opt,
        "opt_profiles": [list(a) for a in ties],
        "sensitivity": sensitivity(game),
        "lipschitz_bound": lipschitz_bound(game),
        "rpoa": cert.to_dict(),
        "weighted_rpoa": weighted.to_dict(),
        "minty": (
            {"feasible": False}
            if minty is None
            else {
                "feasible": True,
                "profile": [x.tolist() for x in minty.profile],
                "worst_slack": minty.worst_slack,
            }
        ),
        "elimination": {
            "removed": [list(r) for r in removed],
            "kept_actions": [list(k) for k in kept],
        },
    }
    if args.after_elimination:
        out["after_elimination"] = {
            "actions": list(reduced.actions),
            "rpoa": rpoa(reduced, z_min=args.z_min).to_dict(),
        }
    text = json.dumps(out, indent=2, sort_keys=True)
    print(text)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _write_json(out, os.path.join(args.out, "certificates.json"))
    return 0


# ---------------------------------------------------------------------------
# scan


def _scan_one(rows: int, cols: int, seed: int) -> dict:
    game = random_game(2, [rows, cols], seed=seed)
    opt, _ = optimal_welfare(game)
    return {
        "seed": seed,
        "opt": opt,
        "rpoa": rpoa(game).rho,
        "poa_worst": poa(game, "worst"),
        "poa_best": poa(game, "best"),
    }


def scan_rows(count: int, rows: int, cols: int, seed: int) -> list[dict]:
    """Certified ratio vs equilibrium welfare for ``count`` seeded games.

    Per-game seeds derive from the base seed; results come back in input
    order regardless of scheduling, so output is deterministic.
    """
    if max(rows, cols) > 5:
        raise SmoothlearnError("scan games are capped at 5 actions per side")
    seeds = [seed + k for k in range(count)]
    workers = thread_budget()
    if workers == 1 or count <= 1:
        return [_scan_one(rows, cols, s) for s in seeds]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda s: _scan_one(rows, cols, s), seeds))


def scan_to_csv(rows_out: list[dict], path: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["seed", "opt", "rpoa", "poa_worst", "poa_best"])
        for r in rows_out:
            writer.writerow(
                [
                    str(r["seed"]),
                    repr(float(r["opt"])),
                    repr(float(r["rpoa"])),
                    repr(float(r["poa_worst"])),
                    repr(float(r["poa_best"])),
                ]
            )
    os.replace(tmp, path)


def cmd_scan(args) -> int:
    if args.count < 0:
        raise SmoothlearnError("count must be >= 0")
    rows_out = scan_rows(args.count, args.rows, args.cols, args.seed)
    for r in rows_out:
        if r["poa_worst"] < r["rpoa"] - 1e-6:
            print(
                f"seed {r['seed']}: poa_worst {r['poa_worst']:.6f} fell below "
                f"certified ratio {r['rpoa']:.6f}",
                file=sys.stderr,
            )
            return 1
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "scan.csv")
    scan_to_csv(rows_out, path)
    print(f"wrote {path} ({len(rows_out)} games)")
    if rows_out and not args.no_figures:
        from .report import save_scan_figure

        fig = save_scan_figure(rows_out, os.path.join(args.out, "poa_vs_rpoa.png"))
        print(f"wrote {fig}")
    return 0


# ---------------------------------------------------------------------------
# examples


def cmd_examples(args) -> int:
    from .acceptance import TOTAL_BUDGET_SECONDS, run_all

    results = run_all(progress=print)
    total = sum(r.seconds for r in results)
    failures = [r for r in results if not r.passed]
    print("-" * 72)
    print(
        f"{len(results) - len(failures)}/{len(results)} criteria passed "
        f"in {total:.1f}s (budget {TOTAL_BUDGET_SECONDS:.0f}s)"
    )
    if total > TOTAL_BUDGET_SECONDS:
        print(f"over the documented budget by {total - TOTAL_BUDGET_SECONDS:.1f}s")
        return 1
    return 1 if failures else 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smoothlearn",
        description="learning dynamics and smoothness analysis on finite games",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a learning algorithm, write traces")
    sim.add_argument("--game", required=True, help="file, builtin name, or random:RxC")
    sim.add_argument("--alg", choices=["ogd", "cgd"], default="ogd")
    sim.add_argument("--eta", default="auto", help="learning rate or 'auto'")
    sim.add_argument("--steps", type=int, required=True)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--no-figures", action="store_true")
    sim.set_defaults(func=cmd_simulate)

    ana = sub.add_parser("analyze", help="certificates and structural bounds")
    ana.add_argument("--game", required=True)
    ana.add_argument("--z-min", type=float, default=0.0)
    ana.add_argument("--ratio-bound", type=float, default=None)
    ana.add_argument("--after-elimination", action="store_true")
    ana.add_argument("--seed", type=int, default=0)
    ana.add_argument("--out", default=None, help="also write certificates.json here")
    ana.set_defaults(func=cmd_analyze)

    scn = sub.add_parser("scan", help="certified vs equilibrium ratios, random games")
    scn.add_argument("--count", type=int, required=True)
    scn.add_argument("--rows", type=int, default=3)
    scn.add_argument("--cols", type=int, default=3)
    scn.add_argument("--seed", type=int, default=0)
    scn.add_argument("--out", default=".")
    scn.add_argument("--no-figures", action="store_true")
    scn.set_defaults(func=cmd_scan)

    exa = sub.add_parser("examples", help="run the full reproduction suite")
    exa.set_defaults(func=cmd_examples)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SmoothlearnError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
