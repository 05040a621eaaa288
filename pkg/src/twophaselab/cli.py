"""Thin command-line client for the twophaselab service.

The numerical subcommands (classify, stationary, evolve, sweep) POST the
configuration to a running service and write the returned artifacts to the
output directory, so the command line carries no numerics of its own.
`serve` launches the service; `verify` runs the acceptance suite in-process.

Exit codes: 0 success, 2 invalid configuration, 3 no admissible profile,
4 blow-up during time integration, 1 anything else.
"""
from __future__ import annotations

import json
import os
from pathlib import Path

import click
import httpx

DEFAULT_URL = os.environ.get("TWOPHASELAB_URL", "http://127.0.0.1:8711")

_EXIT_BY_CODE = {"invalid-config": 2, "no-profile": 3, "blow-up": 4,
                 "structural": 3, "domain-error": 2}


def _client(url: str) -> httpx.Client:
    return httpx.Client(base_url=url, timeout=None)


def _post_scenario(client: httpx.Client, scenario: str, config_path: str,
                   out_dir: str, seed, force_regime) -> int:
    try:
        doc = json.loads(Path(config_path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        click.echo(f"error: cannot read config: {exc}", err=True)
        return 2
    payload = {"config": doc}
    if seed is not None:
        payload["seed"] = seed
    if force_regime is not None:
        payload["force_regime"] = force_regime
    try:
        resp = client.post(f"/{scenario}", json=payload)
    except httpx.HTTPError as exc:
        click.echo(f"error: service unreachable: {exc}", err=True)
        return 1
    if resp.status_code != 200:
        try:
            body = resp.json()
        except ValueError:
            body = {}
        detail = body.get("detail", resp.text)
        code = body.get("code", "domain-error")
        click.echo(f"error [{code}]: {detail}", err=True)
        return _EXIT_BY_CODE.get(code, 1)
    body = resp.json()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, content in sorted(body["files"].items()):
        (out / name).write_text(content, encoding="utf-8")
    click.echo(json.dumps(body["summary"], sort_keys=True))
    return 0


def _scenario_command(name: str, help_text: str):
    @click.command(name=name, help=help_text)
    @click.option("--config", "config_path", required=True,
                  type=click.Path(exists=True, dir_okay=False),
                  help="JSON configuration document")
    @click.option("--out", "out_dir", default=".", show_default=True,
                  help="directory receiving the output artifacts")
    @click.option("--seed", type=int, default=None, help="override the config seed")
    @click.option("--force-regime", default=None,
                  type=click.Choice(["Supersonic", "Subsonic", "Sonic"]),
                  help="override the Mach classification")
    @click.option("--url", default=DEFAULT_URL, show_default=True,
                  help="service base URL")
    @click.pass_context
    def cmd(ctx, config_path, out_dir, seed, force_regime, url):
        client = ctx.obj.get("client") if ctx.obj else None
        own = client is None
        if own:
            client = _client(url)
        try:
            rc = _post_scenario(client, name, config_path, out_dir, seed,
                                force_regime)
        finally:
            if own:
                client.close()
        ctx.exit(rc)

    return cmd


@click.group()
@click.pass_context
def main(ctx):
    """Numerical laboratory for two-phase inflow boundary layers."""
    ctx.ensure_object(dict)


main.add_command(_scenario_command(
    "classify", "Eigen-structure and Mach regime of the far-field state."))
main.add_command(_scenario_command(
    "stationary", "Stationary profile CSV plus spectrum and decay reports."))
main.add_command(_scenario_command(
    "evolve", "Time integration: energy series CSV and final snapshot."))
main.add_command(_scenario_command(
    "sweep", "Boundary-slope scaling table over a delta sweep."))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8711, show_default=True, type=int)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import app
    uvicorn.run(app, host=host, port=port)


@main.command()
@click.option("--quick", is_flag=True,
              help="smoke mode: skip the long stability runs")
@click.pass_context
def verify(ctx, quick):
    """Run the acceptance suite locally and print one line per criterion."""
    from .acceptance import run_all

    results = run_all(quick=quick)
    failed = [r for r in results if not r.passed]
    ctx.exit(1 if failed else 0)
