"""Command-line entry points.

Exit codes: 0 success, 1 verification failure, 2 invalid configuration.
Every artifact written to disk carries the seed and config that produced
it, so any run can be reproduced from its own output.
"""

from __future__ import annotations

import json
import os
import sys

import click
import numpy as np

from .alice import (AliceStrategy, InterleavedAlice, constants_report,
                    constants_to_obj, derive_constants, interleave_beta,
                    verify_interleaved)
from .bob import BobSpec, make_bob
from .boxdim import (box_counting_dimension, boxcount_report_csv,
                     sample_to_csv, sample_winning_points)
from .errors import ConstantsError
from .game import (GameConfig, run_game, summary_csv, transcript_from_obj,
                   transcript_to_obj, verify_transcript)
from .systems import Rectangle, named_system, parse_system_config, sys_id
from .torus import Point
from . import treelab


def _load_system(name: str):
    """--system accepts shorthand names or a path to a config file."""
    if os.path.exists(name):
        with open(name) as f:
            return parse_system_config(f.read())
    return named_system(name)


def _fail_config(msg: str):
    click.echo(f"error: {msg}", err=True)
    sys.exit(2)


def _rect_for(sys_spec, constants, target, width):
    if target is None:
        coords = [0.0] * sys_spec.u
        if sys_spec.kind == "skew-product":
            coords = [0.0, sys_spec.leaf_z0]
    else:
        coords = [float(x) for x in target.split(",")]
    w = constants.c if width is None else float(width)
    return Rectangle(Point.of(*coords), w)


@click.group()
def main():
    """Schmidt-game engine: constants, games, measures, dimensions."""


@main.command()
@click.option("--system", default="linear2", help="system name or config file")
@click.option("--alpha", type=float, required=True)
@click.option("--beta", type=float, required=True)
@click.option("--first-radius", type=float, default=0.25, show_default=True)
@click.option("--scale-l", "scale_l", type=float, default=1.0, show_default=True,
              help="local length-scale cap (1 = whole circle)")
@click.option("--json", "as_json", is_flag=True, help="machine-readable report")
def derive(system, alpha, beta, first_radius, scale_l, as_json):
    """Derive and print the strategy constants for one system."""
    try:
        sys_spec = _load_system(system)
        k = derive_constants(sys_spec, alpha, beta, first_radius, L=scale_l)
    except (ConstantsError, ValueError) as bad:
        _fail_config(str(bad))
    if as_json:
        click.echo(json.dumps(constants_to_obj(k), sort_keys=True))
    else:
        click.echo(constants_report(k, sys_id(sys_spec)))


@main.command()
@click.option("--system", default="linear2")
@click.option("--alpha", type=float, default=0.1, show_default=True)
@click.option("--beta", type=float, default=0.1, show_default=True)
@click.option("--stop-radius", type=float, default=1e-9, show_default=True)
@click.option("--bob", "bob_kind", default="random",
              type=click.Choice(["random", "chaser", "scripted"]))
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--target", default=None, help="comma-separated coordinates")
@click.option("--width", type=float, default=None, help="target width (default: c)")
@click.option("--targets-file", default=None,
              help="JSON list of targets for a multi-target game")
@click.option("--replay", default=None,
              help="transcript to replay Bob from (its config wins over flags)")
@click.option("--out", default=None, help="transcript output path")
@click.option("--json", "as_json", is_flag=True)
def play(system, alpha, beta, stop_radius, bob_kind, seed, target, width,
         targets_file, replay, out, as_json):
    """Play one verified game (single- or multi-target)."""
    try:
        sys_spec = _load_system(system)
        config = GameConfig(alpha=alpha, beta=beta, stop_radius=stop_radius, seed=seed)
    except (ConstantsError, ValueError) as bad:
        _fail_config(str(bad))

    source = None
    if replay is not None:
        with open(replay) as f:
            source = transcript_from_obj(json.load(f))
        # a replay reproduces that game: its config, system, target and
        # adversary moves win over the flags
        config = source.config
        seed = config.seed if config.seed is not None else seed
        alpha, beta = config.alpha, config.beta
        sys_spec = source.system
        bob_kind = "scripted"

    try:
        if targets_file is not None:
            with open(targets_file) as f:
                spec_list = json.load(f)
            per_constants = []
            targets = []
            for i, item in enumerate(spec_list):
                beta_t = interleave_beta(alpha, beta, i + 1)
                k_t = derive_constants(sys_spec, alpha, beta_t, 0.25)
                w = float(item.get("width", k_t.c))
                targets.append(Rectangle(Point.of(*item["target"]), w))
                per_constants.append(k_t)
            alice = InterleavedAlice(sys_spec, targets, config, per_constants)
            rect = targets[0]
        else:
            k = derive_constants(sys_spec, alpha, beta, 0.25)
            if source is not None:
                rect = source.rectangle
            else:
                rect = _rect_for(sys_spec, k, target, width)
            alice = AliceStrategy(sys_spec, rect, config, k)
    except (ConstantsError, ValueError) as bad:
        _fail_config(str(bad))

    bob = make_bob(BobSpec(kind=bob_kind, seed=seed), sys_spec, rect, source=source)
    t = run_game(config, sys_spec, rect, alice, bob)
    if targets_file is not None:
        report = verify_interleaved(t, targets, per_constants,
                                    alice.dispatch_log, sys_spec)
    else:
        report = verify_transcript(t, k, sys_spec, rect)

    if out:
        with open(out, "w") as f:
            json.dump(transcript_to_obj(t), f, sort_keys=True)
        with open(out + ".report.json", "w") as f:
            json.dump(report.to_obj(), f, sort_keys=True)
    if as_json:
        click.echo(json.dumps({"ok": report.ok, "moves": len(t.moves),
                               "final_radius": t.final_radius,
                               "outcome": list(t.outcome.coords)}, sort_keys=True))
    else:
        click.echo(f"# seed={seed} system={sys_id(sys_spec)}")
        click.echo(f"{len(t.moves)} moves, final radius {t.final_radius:.3g}, "
                   f"verification {'ok' if report.ok else 'FAILED'}")
    if not report.ok:
        sys.exit(1)


@main.command()
@click.option("--system", default="linear2")
@click.option("--alpha", type=float, default=0.1, show_default=True)
@click.option("--beta", type=float, default=0.1, show_default=True)
@click.option("--stop-radius", type=float, default=1e-9, show_default=True)
@click.option("--bob", "bob_kind", default="random",
              type=click.Choice(["random", "chaser"]))
@click.option("--games", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--target", default=None)
@click.option("--width", type=float, default=None)
@click.option("--out", default=None, help="summary CSV path")
def tournament(system, alpha, beta, stop_radius, bob_kind, games, seed,
               target, width, out):
    """Seeded batch of games; exit 1 unless every verification passes."""
    try:
        sys_spec = _load_system(system)
        config = GameConfig(alpha=alpha, beta=beta, stop_radius=stop_radius, seed=seed)
        k = derive_constants(sys_spec, alpha, beta, 0.25)
        rect = _rect_for(sys_spec, k, target, width)
    except (ConstantsError, ValueError) as bad:
        _fail_config(str(bad))
    children = np.random.SeedSequence(seed).spawn(games)
    rows = []
    failures = 0
    for i in range(games):
        child = int(children[i].generate_state(1)[0])
        alice = AliceStrategy(sys_spec, rect, config, k)
        bob = make_bob(BobSpec(kind=bob_kind, seed=child), sys_spec, rect)
        t = run_game(config, sys_spec, rect, alice, bob)
        report = verify_transcript(t, k, sys_spec, rect)
        if not report.ok:
            failures += 1
        rows.append({"seed": child, "winner": "alice" if report.ok else "bob",
                     "min_orbit_distance": report.min_orbit_distance,
                     "length": len(t.moves)})
    prov = (f"seed={seed} system={sys_id(sys_spec)} alpha={alpha} beta={beta} "
            f"bob={bob_kind} games={games}")
    text = summary_csv(rows, prov)
    if out:
        with open(out, "w") as f:
            f.write(text)
    click.echo(f"# {prov}")
    click.echo(f"{games - failures}/{games} verified")
    if failures:
        sys.exit(1)


@main.command()
@click.option("--system", default="linear2")
@click.option("--alpha", type=float, default=0.1, show_default=True)
@click.option("--beta", type=float, default=0.01, show_default=True)
@click.option("--depth", type=int, default=2, show_default=True)
@click.option("--out", default=None, help="CSV output path (materialized trees)")
@click.option("--json", "as_json", is_flag=True)
def tree(system, alpha, beta, depth, out, as_json):
    """Build the reply tree, rescale masses, print dimension bounds."""
    try:
        sys_spec = _load_system(system)
        config = GameConfig(alpha=alpha, beta=beta, stop_radius=1e-9)
        opening = treelab.default_opening(config, sys_spec.u)
        k = derive_constants(sys_spec, alpha, beta, opening.radius)
        rect = Rectangle(Point.of(*([0.0] * sys_spec.u)), k.c)
    except (ConstantsError, ValueError) as bad:
        _fail_config(str(bad))

    closed = treelab.closed_form_bound(sys_spec.u, alpha, beta)
    branching = treelab.theoretical_packing_count(sys_spec.u, beta)
    eager_nodes = sum(branching ** l for l in range(depth + 1))
    obj: dict = {"closed_form": closed, "depth": depth, "branching": branching}

    try:
        if eager_nodes <= 500_000:
            t = treelab.build_game_tree(sys_spec, rect, config, k, depth, opening)
            mu = treelab.rescale_measures(t)
            obj["nodes"] = sum(len(lv.centers) for lv in t.levels)
            obj["total_mass"] = float(mu.total_mass)
            if depth >= 2:
                bound = treelab.dimension_lower_bound(t)
                obj["measured"] = bound.measured
            if out:
                with open(out, "w") as f:
                    f.write(treelab.tree_to_csv(t, mu))
        else:
            lazy = treelab.LazyTree(sys_spec, rect, config, k, depth, opening)
            obj["nodes"] = "lazy"
            obj["total_mass"] = lazy.total_mass
            if depth >= 2:
                obj["measured"] = lazy.dimension_lower_bound().measured
    except ValueError as bad:
        _fail_config(str(bad))

    if as_json:
        click.echo(json.dumps(obj, sort_keys=True))
    else:
        click.echo(f"# system={sys_id(sys_spec)} alpha={alpha} beta={beta} depth={depth}")
        measured = obj.get("measured")
        click.echo(f"closed-form bound {closed:.6f}"
                   + (f", measured {measured:.6f}" if measured is not None else
                      " (depth < 2: no measured bound)"))
        click.echo(f"branching {branching}, nodes {obj['nodes']}, "
                   f"total mass {obj['total_mass']:.6g}")


@main.command()
@click.option("--system", default="linear2")
@click.option("--alpha", type=float, default=0.1, show_default=True)
@click.option("--beta", type=float, default=0.01, show_default=True)
@click.option("--stop-radius", type=float, default=1e-9, show_default=True)
@click.option("--count", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--target", default=None)
@click.option("--out", default=None, help="sample CSV path")
@click.option("--json", "as_json", is_flag=True)
def dimension(system, alpha, beta, stop_radius, count, seed, target, out, as_json):
    """Box-counting dimension of sampled winning points."""
    try:
        sys_spec = _load_system(system)
        config = GameConfig(alpha=alpha, beta=beta, stop_radius=stop_radius, seed=seed)
        k = derive_constants(sys_spec, alpha, beta, 0.25)
        rect = _rect_for(sys_spec, k, target, None)
    except (ConstantsError, ValueError) as bad:
        _fail_config(str(bad))
    try:
        sample = sample_winning_points(sys_spec, rect, config, k, count, seed)
    except RuntimeError as bad:
        click.echo(f"error: {bad}", err=True)
        sys.exit(1)
    report = box_counting_dimension(sample)
    if out:
        with open(out, "w") as f:
            f.write(sample_to_csv(sample))
        with open(out + ".slope.csv", "w") as f:
            f.write(boxcount_report_csv(report))
    if as_json:
        click.echo(json.dumps({"dimension": report.dimension,
                               "n_points": report.n_points,
                               "scales": report.scales,
                               "counts": report.counts}, sort_keys=True))
    else:
        click.echo(f"# seed={seed} system={sys_id(sys_spec)} count={count}")
        click.echo(f"box-counting slope {report.dimension:.4f} "
                   f"({report.n_points} points, {len(report.scales)} scales)")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8642, show_default=True)
@click.option("--reveal", is_flag=True, help="expose danger hulls in the state endpoint")
@click.option("--idle", type=float, default=900.0, show_default=True,
              help="session idle expiry in seconds")
def serve(host, port, reveal, idle):
    """Run the match server (remote-Bob protocol + state endpoint)."""
    import uvicorn
    from .server import create_app
    try:
        uvicorn.run(create_app(reveal=reveal, idle_seconds=idle),
                    host=host, port=port, log_level="warning")
    except OSError as bad:
        _fail_config(f"cannot bind {host}:{port}: {bad}")


if __name__ == "__main__":
    main()
