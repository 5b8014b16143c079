"""Command line entry points: batch runs, the developer REPL, and the gateway."""

from __future__ import annotations

import sys

import click

from .batch import BatchError, run_batch
from .config import Config, load_config
from .repl import build_dispatcher, run_repl
from .retrieval.index import DuplicateDocIdError, EmptyCorpusError
from .store import InteractionStore


def _load(config_path) -> Config:
    return load_config(config_path) if config_path else Config()


@click.group()
def main():
    """Conversational information seeking engine."""


@main.command()
@click.option("--topics", required=True, type=click.Path(exists=True), help="Topics file (ndjson).")
@click.option("--corpus", required=True, type=click.Path(exists=True), help="Corpus file (ndjson).")
@click.option("--out", required=True, type=click.Path(), help="Run file to write.")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def batch(topics, corpus, out, config_path):
    """Run every topic through the pipeline and write a standard run file."""
    try:
        run_batch(topics, corpus, out, _load(config_path))
    except (BatchError, DuplicateDocIdError, EmptyCorpusError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@main.command()
@click.option("--corpus", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def repl(corpus, config_path):
    """Interactive session for development and debugging."""
    run_repl(corpus, _load(config_path))


@main.command()
@click.option("--listen", default="127.0.0.1:8000", help="HOST:PORT to bind.")
@click.option("--corpus", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def serve(listen, corpus, config_path):
    """Serve the chat gateway (direct and Wizard-of-Oz modes)."""
    import uvicorn

    from .gateway import Gateway, create_app

    cfg = _load(config_path)
    dispatcher = build_dispatcher(corpus, cfg)
    store = InteractionStore(cfg.get("store.path", "interactions.log"))
    app = create_app(Gateway(store, dispatcher, cfg))
    host, _, port = listen.partition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000), log_level="warning")


if __name__ == "__main__":
    main()
