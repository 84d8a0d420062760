"""Command-line client for the aoi-lab service.

The CLI is a thin HTTP client: every mode posts an experiment request to
the service's /api/experiment endpoint and writes the returned rows as CSV.
By default it mounts the app in-process (no network, no running server);
pass --server to talk to a remote instance instead.

Exit codes: 0 success, 1 comparison mismatch, 2 invalid input.
"""

from __future__ import annotations

import math
import sys

import click
import httpx
import yaml

from . import experiments
from .experiments import MODES, STATUS_INVALID


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    # mount the service in-process; TestClient is a synchronous httpx.Client
    # that drives the ASGI app directly, no running server needed
    from starlette.testclient import TestClient

    from .service import create_app
    return TestClient(create_app(), raise_server_exceptions=False)


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except (OSError, yaml.YAMLError) as exc:
        raise click.ClickException(str(exc))
    if not isinstance(raw, dict):
        raise click.ClickException("config root must be a mapping")
    return raw


def _run_mode(mode, config, out, seed, replications, horizon, server):
    raw = _load_config(config)
    raw["mode"] = mode
    if seed is not None:
        raw["seed"] = seed
    if replications is not None:
        raw["replications"] = replications
    if horizon is not None:
        raw["horizon"] = horizon
    payload = {
        "mode": mode,
        "params": raw.get("params") or {},
        "sweep": raw.get("sweep") or {},
        "seed": int(raw.get("seed", 0)),
        "replications": raw.get("replications"),
        "horizon": raw.get("horizon"),
    }
    with _client(server) as client:
        try:
            resp = client.post("/api/experiment", json=payload)
        except httpx.HTTPError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(STATUS_INVALID)
    if resp.status_code == 422:
        detail = resp.json().get("detail", "invalid request")
        click.echo(f"error: {detail}", err=True)
        sys.exit(STATUS_INVALID)
    if resp.status_code != 200:
        click.echo(f"error: service returned {resp.status_code}", err=True)
        sys.exit(STATUS_INVALID)
    body = resp.json()
    rows = [{k: (math.inf if v is None and k.endswith(("aoi", "mean")) else v)
             for k, v in row.items()} for row in body["rows"]]
    if out:
        experiments.write_csv(rows, out)
    else:
        for row in rows:
            click.echo(" ".join(f"{k}={v}" for k, v in row.items()))
    sys.exit(body["status"])


@click.group()
def main():
    """Age-of-information analysis, simulation and scheme selection."""


def _add_mode(mode):
    @main.command(name=mode, help=f"Run a {mode!r} experiment from a config file.")
    @click.option("--config", required=True, type=click.Path(exists=True, dir_okay=False))
    @click.option("--out", type=click.Path(dir_okay=False), default=None)
    @click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None)
    @click.option("--replications", type=click.IntRange(min=2), default=None)
    @click.option("--horizon", type=float, default=None)
    @click.option("--server", default=None,
                  help="Base URL of a running service; default runs in-process.")
    def _cmd(config, out, seed, replications, horizon, server):
        _run_mode(mode, config, out, seed, replications, horizon, server)
    return _cmd


for _mode in MODES:
    _add_mode(_mode)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    """Start the HTTP service."""
    import uvicorn
    uvicorn.run("aoi_lab.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
