"""Command-line entry points: scenario tools, the bench harness, the server."""

from __future__ import annotations

import sys
from pathlib import Path

import click
import uvicorn

from . import scenarios as scenario_mod
from .llm import (
    CompletionRequest,
    HttpProvider,
    Provider,
    ScriptedProvider,
    StubDelayProvider,
    measure_latency,
)
from .metrics import TranscriptPair, bench_report, latency_cell, rtf, wer
from .prompts import PromptEngine
from .scenarios import ScenarioStore, StorageError, ValidationFailed
from .server import create_app


@click.group()
def scenario_cli() -> None:
    """Validate and import OSCE scenario documents."""


@scenario_cli.command("validate")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
def scenario_validate(file: str) -> None:
    try:
        scenario = scenario_mod.validate(scenario_mod.load_document(file))
    except (ValidationFailed, StorageError) as exc:
        if isinstance(exc, ValidationFailed):
            for violation in exc.violations:
                click.echo(f"invalid: {violation}", err=True)
        else:
            click.echo(f"invalid: {exc}", err=True)
        sys.exit(1)
    click.echo(f"valid: {scenario.id} ({len(scenario.checklist)} checklist items)")


@scenario_cli.command("import")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--store-dir", default="scenarios", show_default=True, help="Scenario store directory.")
def scenario_import(file: str, store_dir: str) -> None:
    try:
        scenario = scenario_mod.validate(scenario_mod.load_document(file))
    except (ValidationFailed, StorageError) as exc:
        click.echo(f"invalid: {exc}", err=True)
        sys.exit(1)
    ScenarioStore(store_dir).save(scenario)
    click.echo(f"imported {scenario.id} into {store_dir}")


@click.group()
def bench_cli() -> None:
    """Speech-metric and LLM-latency benchmarks."""


@bench_cli.command("wer")
@click.option("--pairs", "pairs_file", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Tab-separated lines: reference<TAB>hypothesis.")
def bench_wer(pairs_file: str) -> None:
    rows = []
    for i, line in enumerate(Path(pairs_file).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        reference, _, hypothesis = line.partition("\t")
        pair = TranscriptPair.from_text(reference, hypothesis)
        rows.append((f"pair-{i}", f"{wer(pair):.3f}"))
    click.echo(bench_report(("Pair", "Word Error Rate"), rows))


@bench_cli.command("rtf")
@click.option("--records", "records_file", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Tab-separated lines: name<TAB>processing_s<TAB>audio_s.")
def bench_rtf(records_file: str) -> None:
    rows = []
    for line in Path(records_file).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        name, processing, audio = line.split("\t")
        result = rtf(float(processing), float(audio))
        rows.append((name, f"{result.ratio:.3f}", "yes" if result.real_time_capable else "no"))
    click.echo(bench_report(("Model", "Real Time Factor", "Real Time Capable"), rows))


def _build_provider(name: str, delay: float, script: str | None, endpoint: str | None, model: str) -> Provider:
    if name == "stub":
        return StubDelayProvider(delay_s=delay)
    if name == "scripted":
        if not script:
            raise click.UsageError("--script is required for the scripted provider")
        return ScriptedProvider.from_file(script)
    if name == "live":
        if not endpoint:
            raise click.UsageError("--endpoint is required for the live provider")
        return HttpProvider(endpoint=endpoint, model=model)
    raise click.UsageError(f"unknown provider {name!r}")


@bench_cli.command("latency")
@click.option("--provider", "provider_name", default="stub", show_default=True,
              type=click.Choice(["stub", "scripted", "live"]))
@click.option("--n", default=10, show_default=True, help="Repetitions per measurement.")
@click.option("--words", default=50, show_default=True, help="Requested story length in words.")
@click.option("--delay", default=0.05, show_default=True, help="Stub provider delay in seconds.")
@click.option("--script", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--endpoint", default=None, help="Live provider endpoint URL.")
@click.option("--model", default="", help="Live provider model name.")
def bench_latency(provider_name: str, n: int, words: int, delay: float,
                  script: str | None, endpoint: str | None, model: str) -> None:
    provider = _build_provider(provider_name, delay, script, endpoint, model)
    request = CompletionRequest(prompt=f"Please write a short story of about {words} words.")
    stats = measure_latency(provider, request, n)
    label = model or provider_name
    click.echo(bench_report(("Model", "Response Time"), [(label, latency_cell(stats))]))


@click.command()
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--scenario-dir", default="scenarios", show_default=True)
@click.option("--provider", "provider_name", default="scripted", show_default=True,
              type=click.Choice(["scripted", "live"]))
@click.option("--script", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--endpoint", default=None, help="Live provider endpoint URL.")
@click.option("--model", default="", help="Live provider model name.")
@click.option("--templates", "template_dir", type=click.Path(file_okay=False), default=None)
@click.option("--tick-interval", default=1.0, show_default=True,
              help="Seconds per session tick (drift clock).")
def serve_cli(port: int, host: str, scenario_dir: str, provider_name: str, script: str | None,
              endpoint: str | None, model: str, template_dir: str | None, tick_interval: float) -> None:
    """Run the training API server."""
    provider = _build_provider(provider_name, 0.0, script, endpoint, model)
    app = create_app(
        ScenarioStore(scenario_dir),
        provider,
        PromptEngine(template_dir),
        tick_interval_s=tick_interval or None,
    )
    uvicorn.run(app, host=host, port=port)
