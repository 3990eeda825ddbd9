"""Command line front end: record, train, eval, replay, serve.

Exit codes: 0 on success, 2 for configuration problems, 3 for data
problems (unreadable or inconsistent recordings and banks).
"""

import math
import sys

import click

from .config import SystemConfig, default_config, load_config
from .errors import ConfigError, DataError
from .memory import MemoryBank, canonical_dumps
from .recording import Recording
from .scenarios import (
    constant_touch,
    force_speed_curve,
    make_sequence,
    make_sweep,
    replay_max_error,
)
from .sim import derive_features, run_closed_loop, run_scripted

__all__ = ["cli", "main"]


def _load_config(path) -> SystemConfig:
    return load_config(path) if path else default_config()


def _parse_waypoints(text: str) -> list[list[float]]:
    try:
        return [[float(x) for x in point.split(",")] for point in text.split(";")]
    except ValueError as exc:
        raise ConfigError(f"cannot parse waypoints {text!r}: {exc}") from exc


def _parse_banks(pairs) -> dict[str, str]:
    out = {}
    for pair in pairs:
        patch, sep, path = pair.partition("=")
        if not sep or not patch or not path:
            raise ConfigError(f"expected PATCH=FILE, got {pair!r}")
        out[patch] = path
    return out


def _load_banks(pairs, config: SystemConfig) -> dict[str, MemoryBank]:
    encoder = config.build_association_encoder()
    banks = {}
    for patch, path in _parse_banks(pairs).items():
        bank = MemoryBank.load(path)
        bank.require_encoder(encoder)
        banks[patch] = bank
    return banks


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="YAML system configuration (defaults to the built-in wrist).")
@click.pass_context
def cli(ctx, config_path):
    """Touch-driven sequential memory for a simulated arm."""
    ctx.obj = _load_config(config_path)


@cli.command()
@click.option("--kind", type=click.Choice(["sweep", "sequence"]), required=True)
@click.option("--patch", required=True, help="Patch held during the recording.")
@click.option("--magnitude", type=float, required=True, help="Touch magnitude in N.")
@click.option("--speed", type=float, default=None, help="Sweep speed in rad/s.")
@click.option("--waypoints", default=None,
              help="Sequence waypoints, e.g. '0,-0.6,0;0,0.6,0'.")
@click.option("--ticks-per-segment", type=int, default=13, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True, help="Recording file (JSONL).")
@click.pass_obj
def record(config, kind, patch, magnitude, speed, waypoints, ticks_per_segment, seed, out):
    """Run a scripted touch session and save the recording."""
    if kind == "sweep":
        if speed is None:
            raise ConfigError("sweep recording needs --speed")
        script = make_sweep(config, patch, magnitude, speed)
    else:
        if waypoints is None:
            raise ConfigError("sequence recording needs --waypoints")
        script = make_sequence(
            config, patch, _parse_waypoints(waypoints), ticks_per_segment, magnitude
        )
    recording = run_scripted(config, script, script.n_ticks, seed=seed)
    recording.save(out)
    click.echo(f"recorded {len(recording.states)} states -> {out}")


@cli.command()
@click.option("--recording", "recordings", type=click.Path(), multiple=True, required=True)
@click.option("--patch", required=True, help="Patch whose tactile stream to train on.")
@click.option("--out", type=click.Path(), required=True, help="Bank file (JSON).")
@click.pass_obj
def train(config, recordings, patch, out):
    """Turn one or more recordings into a memory bank."""
    encoder = config.build_association_encoder()
    banks = []
    for path in recordings:
        rec = Recording.load(path)
        features = derive_features(config, rec).get(patch)
        if not features:
            raise DataError(f"{path} holds no tactile samples for patch {patch!r}")
        banks.append(
            MemoryBank.train(
                encoder, rec.states, features,
                patch_id=patch, beta=config.memory.beta,
            )
        )
    bank = MemoryBank.merge(banks)
    bank.save(out)
    click.echo(f"trained {bank.size} associations -> {out}")


@cli.command("eval")
@click.option("--bank", "banks", multiple=True, required=True,
              help="PATCH=FILE, repeatable.")
@click.option("--patch", required=True, help="Patch to press during evaluation.")
@click.option("--magnitudes", default="2,5,10,15", show_default=True)
@click.option("--beta", type=float, default=None,
              help="Recall temperature (defaults to the compliance setting).")
@click.option("--ticks", type=int, default=60, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Write the curve as JSON.")
@click.pass_obj
def eval_cmd(config, banks, patch, magnitudes, beta, ticks, seed, out):
    """Closed-loop force-speed curve for one patch."""
    loaded = _load_banks(banks, config)
    if patch not in loaded:
        raise ConfigError(f"no bank given for patch {patch!r}")
    mags = [float(m) for m in magnitudes.split(",")]
    beta = config.memory.beta_compliance if beta is None else beta
    curve = force_speed_curve(config, loaded, patch, mags, beta, n_ticks=ticks, seed=seed)
    spearman = curve["spearman"]
    payload = {
        "patch": patch,
        "beta": beta,
        "speeds": {str(m): curve["speeds"][m] for m in mags},
        # rank correlation is undefined for a single magnitude
        "spearman": spearman if math.isfinite(spearman) else None,
    }
    text = canonical_dumps(payload)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    click.echo(text)


@cli.command()
@click.option("--bank", "banks", multiple=True, required=True,
              help="PATCH=FILE, repeatable.")
@click.option("--recording", "recording_path", type=click.Path(), required=True,
              help="The guided recording to reproduce.")
@click.option("--patch", required=True)
@click.option("--magnitude", type=float, required=True,
              help="Touch magnitude used while replaying.")
@click.option("--beta", type=float, default=None,
              help="Recall temperature (defaults to the replay setting).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Trajectory CSV.")
@click.pass_obj
def replay(config, banks, recording_path, patch, magnitude, beta, seed, out):
    """Re-execute a recorded sequence from memory and report the error."""
    loaded = _load_banks(banks, config)
    if patch not in loaded:
        raise ConfigError(f"no bank given for patch {patch!r}")
    recording = Recording.load(recording_path)
    n_ticks = len(recording.states) - 1
    beta = config.memory.beta_replay if beta is None else beta
    start = recording.states[0][1]
    log = run_closed_loop(
        config,
        loaded,
        constant_touch(patch, magnitude, n_ticks),
        n_ticks,
        beta,
        start=start,
        seed=seed,
    )
    errors = replay_max_error(recording, log)
    if out:
        log.to_csv(out)
    payload = {
        "ticks": n_ticks,
        "max_error": {name: float(e) for name, e in zip(config.joint_names, errors)},
    }
    click.echo(canonical_dumps(payload))


@cli.command()
@click.option("--bank", "banks", multiple=True, help="PATCH=FILE, repeatable.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8787, show_default=True)
@click.option("--beta", type=float, default=None)
@click.pass_obj
def serve(config, banks, host, port, beta):
    """Serve the live session socket and health endpoint."""
    import uvicorn

    from .service import create_app

    app = create_app(config, _load_banks(banks, config), beta)
    uvicorn.run(app, host=host, port=port, log_level="warning")


def main(argv=None):
    try:
        cli(args=argv, standalone_mode=False)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    except DataError as exc:
        click.echo(f"data error: {exc}", err=True)
        sys.exit(3)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        sys.exit(130)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    sys.exit(0)


if __name__ == "__main__":
    main()
