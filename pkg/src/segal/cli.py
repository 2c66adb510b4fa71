"""Command-line interface.

Batch commands (``synth``, ``run``, ``sweep``, ``compare``) operate on local
dataset directories. ``serve`` starts the annotation service; the ``client``
group is a thin HTTP client for a running service, which is what the
annotation console automates in a browser.
"""

from __future__ import annotations

import base64
import json
import logging
from pathlib import Path

import click
import httpx

from . import report as report_mod
from .dataset_io import load_dataset, write_dataset
from .loop import (
    ExperimentConfig,
    ExperimentSession,
    fully_supervised_reference,
    run_experiment,
    run_sweep,
)
from .synth import SynthConfig, default_color_means, generate


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging.")
def main(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


@main.command()
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@click.option("--num-samples", default=600, show_default=True)
@click.option("--height", default=32, show_default=True)
@click.option("--width", default=32, show_default=True)
@click.option("--classes", "num_classes", default=5, show_default=True)
@click.option("--priors", default=None, help="Comma-separated class priors (must sum to 1).")
@click.option("--sites", default=6, show_default=True, help="Voronoi sites per image.")
@click.option("--noise", default=0.12, show_default=True, help="Gaussian color noise sigma.")
@click.option("--separation", default=1.0, show_default=True, help="Color-mean separation scale.")
@click.option("--seed", default=0, show_default=True)
def synth(out_dir, num_samples, height, width, num_classes, priors, sites, noise, separation, seed):
    """Generate a synthetic imbalanced segmentation dataset directory."""
    kwargs = dict(
        num_samples=num_samples,
        height=height,
        width=width,
        num_classes=num_classes,
        region_sites=sites,
        noise_sigma=noise,
        color_means=default_color_means(num_classes, separation),
        seed=seed,
    )
    if priors is not None:
        kwargs["class_priors"] = _parse_floats(priors)
    cfg = SynthConfig(**kwargs)
    ds = generate(cfg)
    write_dataset(ds, out_dir, extra_manifest={"synth_config": cfg.to_dict()})
    click.echo(f"wrote {len(ds)} samples to {out_dir}")


_CONFIG_OPTIONS = [
    click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path), default=None,
                 help="Flat JSON experiment config; CLI flags override it."),
    click.option("--strategy", type=click.Choice(["dcau", "entropy", "random", "coreset"]), default=None),
    click.option("--alpha", type=float, default=None),
    click.option("--gamma", type=float, default=None),
    click.option("--per-cycle-k", type=int, default=None),
    click.option("--cycles", type=int, default=None),
    click.option("--initial-labeled", type=int, default=None),
    click.option("--seed", type=int, default=None),
    click.option("--learning-rate", type=float, default=None),
    click.option("--epochs", type=int, default=None),
]


def _with_config_options(fn):
    for option in reversed(_CONFIG_OPTIONS):
        fn = option(fn)
    return fn


def _build_config(config_path, **overrides) -> ExperimentConfig:
    mapping = {} if config_path is None else json.loads(Path(config_path).read_text())
    for key in ("strategy", "alpha", "gamma", "per_cycle_k", "cycles", "initial_labeled", "seed",
                "learning_rate", "epochs"):
        if overrides.get(key) is not None:
            mapping[key] = overrides[key]
    return ExperimentConfig.from_mapping(mapping)


@main.command()
@click.option("--dataset", "dataset_dir", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@_with_config_options
def run(dataset_dir, out_dir, config_path, **overrides):
    """Run one oracle-mode experiment; writes cycles.csv and summary.json."""
    cfg = _build_config(config_path, **overrides)
    ds = load_dataset(dataset_dir)
    session = ExperimentSession(ds, cfg)
    records = session.run_oracle()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report_mod.emit_cycle_csv(records, out / "cycles.csv")
    test_report = session.evaluate_test() if len(session.test_ds) else None
    summary = {
        "config": cfg.to_mapping(),
        "cycles_run": len(records),
        "final_val_miou": records[-1].miou,
        "final_val_iou": list(records[-1].iou),
        "test_miou": None if test_report is None else test_report.miou,
        "test_iou": None if test_report is None else list(test_report.iou),
        "labeled_final": len(session.pool.labeled_ids),
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    click.echo(f"{cfg.strategy}: {len(records)} cycles, final val mIoU "
               f"{records[-1].miou:.4f}, outputs in {out}")


@main.command()
@click.option("--dataset", "dataset_dir", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--axis", required=True, type=click.Choice(["per_cycle_k", "learning_rate", "alpha", "gamma"]))
@click.option("--values", required=True, help="Comma-separated values for the swept axis.")
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@_with_config_options
def sweep(dataset_dir, axis, values, out_dir, config_path, **overrides):
    """Ablation sweep: one run per value of the chosen axis, shared seed."""
    cfg = _build_config(config_path, **overrides)
    ds = load_dataset(dataset_dir)
    swept = run_sweep(ds, cfg, axis, list(_parse_floats(values)))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "sweep.json").write_text(json.dumps(swept.to_dict(), indent=2) + "\n")
    for row in swept.rows:
        report_mod.emit_cycle_csv(row.records, out / f"cycles_{axis}_{row.value:g}.csv")
        click.echo(f"{axis}={row.value:g}: final mIoU {row.final_miou:.4f}")
    click.echo(f"sweep outputs in {out}")


@main.command()
@click.option("--dataset", "dataset_dir", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--strategies", default="dcau,entropy,random", show_default=True)
@click.option("--with-upper-bound", is_flag=True, help="Add a fully supervised reference run.")
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
@_with_config_options
def compare(dataset_dir, strategies, with_upper_bound, out_path, config_path, **overrides):
    """Run several strategies on one dataset and emit the comparison JSON."""
    ds = load_dataset(dataset_dir)
    reportset = {}
    for strategy in [s.strip() for s in strategies.split(",") if s.strip()]:
        cfg = _build_config(config_path, **{**overrides, "strategy": strategy})
        reportset[strategy] = run_experiment(ds, cfg)
        click.echo(f"{strategy}: final val mIoU {reportset[strategy][-1].miou:.4f}")
    upper = None
    if with_upper_bound:
        upper = fully_supervised_reference(ds, _build_config(config_path, **overrides))
        click.echo(f"upper bound (fully supervised): mIoU {upper['miou']:.4f}")
    report_mod.emit_comparison(reportset, out_path, upper_bound=upper)
    click.echo(f"comparison written to {out_path}")


@main.command()
@click.option("--dataset", "dataset_dir", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--state", "state_dir", required=True, type=click.Path(path_type=Path))
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--console", "console_dir", type=click.Path(path_type=Path), default=None,
              help="Directory of built console assets to serve at /.")
def serve(dataset_dir, config_path, state_dir, port, host, console_dir):
    """Start the human-in-the-loop annotation service."""
    import uvicorn

    from .service import build_app

    mapping = {} if config_path is None else json.loads(Path(config_path).read_text())
    mapping["annotation_mode"] = "human"
    cfg = ExperimentConfig.from_mapping(mapping)
    if console_dir is None:
        bundled = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        console_dir = bundled if bundled.is_dir() else None
    app = build_app(dataset_dir, cfg, state_dir, console_dir=console_dir)
    uvicorn.run(app, host=host, port=port)


@main.group()
@click.option("--url", default="http://127.0.0.1:8000", show_default=True)
@click.pass_context
def client(ctx, url):
    """Thin HTTP client for a running annotation service."""
    ctx.obj = url.rstrip("/")


def _client_get(url: str, path: str) -> dict:
    response = httpx.get(url + path, timeout=30.0)
    response.raise_for_status()
    return response.json()


@client.command("status")
@click.pass_obj
def client_status(url):
    click.echo(json.dumps(_client_get(url, "/status"), indent=2))


@client.command("queue")
@click.pass_obj
def client_queue(url):
    click.echo(json.dumps(_client_get(url, "/queue"), indent=2))


@client.command("metrics")
@click.pass_obj
def client_metrics(url):
    click.echo(json.dumps(_client_get(url, "/metrics"), indent=2))


@client.command("advance")
@click.pass_obj
def client_advance(url):
    response = httpx.post(url + "/cycle/advance", timeout=30.0)
    response.raise_for_status()
    click.echo(json.dumps(response.json(), indent=2))


@client.command("submit")
@click.option("--id", "sample_id", required=True)
@click.option("--mask", "mask_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.pass_obj
def client_submit(url, sample_id, mask_path):
    """Submit an index-mask PNG as the label for a pending sample."""
    payload = {
        "id": sample_id,
        "mask_png_base64": base64.b64encode(Path(mask_path).read_bytes()).decode("ascii"),
    }
    response = httpx.post(url + "/labels", json=payload, timeout=30.0)
    if response.status_code >= 400:
        click.echo(f"error {response.status_code}: {response.text}", err=True)
        raise SystemExit(1)
    click.echo(json.dumps(response.json(), indent=2))


if __name__ == "__main__":
    main()
