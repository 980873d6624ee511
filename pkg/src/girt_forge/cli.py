"""Command-line entry points for the full workflow.

Exit codes: 0 success, 1 usage error, 2 data error. A config file named by
the GIRT_FORGE_CONFIG environment variable (key=value lines or a JSON
object) overrides the corresponding command-line flags.
"""

from __future__ import annotations

import json
import os
import sys
from contextlib import nullcontext
from pathlib import Path

import click

from .analysis import stratified_sample
from .errors import DataError, GirtForgeError
from .generate import (
    DecodingConfig,
    RemoteBackend,
    RetrievalBackend,
    RetrievalIndex,
    evaluate,
)
from .instruct import (
    RemoteSummarizer,
    StubSummarizer,
    expand_variants,
    pair_from_row,
    pair_to_row,
    parse_instruction,
    split_dataset,
)
from .irt import parse_irt, render_irt
from .pipeline import (
    DEFAULT_LATIN_THRESHOLD,
    ingest,
    run_pipeline,
    stats_to_json,
    write_corpus_jsonl,
)
from .report import (
    format_report_table,
    render_stats_figure,
    report_to_json,
    write_report_files,
)
from .service import ServiceConfig, create_app


def _config_overrides() -> dict:
    path = os.environ.get("GIRT_FORGE_CONFIG")
    if not path:
        return {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read config file {path}: {exc}") from exc
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            return {str(k): v for k, v in json.loads(stripped).items()}
        except json.JSONDecodeError as exc:
            raise DataError(f"config file {path} is not valid JSON: {exc}") from exc
    overrides = {}
    for line in stripped.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if sep:
            overrides[key.strip().replace("-", "_")] = value.strip()
    return overrides


def _cfg(overrides: dict, key: str, fallback, convert=None):
    if key not in overrides:
        return fallback
    value = overrides[key]
    if convert is not None and isinstance(value, str):
        return convert(value)
    return value


def _open_out(out: str | None):
    return open(out, "w", encoding="utf-8") if out else nullcontext(sys.stdout)


def _read_rows(path: str) -> list[dict]:
    rows = []
    try:
        with open(path, encoding="utf-8") as handle:
            for line_no, line in enumerate(handle, start=1):
                if line.strip():
                    try:
                        rows.append(json.loads(line))
                    except json.JSONDecodeError as exc:
                        raise DataError(f"{path}:{line_no}: invalid JSON: {exc.msg}") from exc
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    return rows


def _read_pairs(path: str):
    return [pair_from_row(row) for row in _read_rows(path)]


def _index_items(path: str) -> list:
    source = Path(path)
    if source.is_dir():
        records = ingest(source)
        return [(r.id, r.parsed) for r in records if r.parsed is not None]
    items = []
    for row in _read_rows(path):
        text = row.get("canonical") or row.get("content") or ""
        items.append((str(row.get("id", len(items))), parse_irt(text)))
    return items


def _build_backend(backend: str, index: str | None, endpoint: str | None):
    if backend == "retrieval":
        if not index:
            raise click.UsageError("--index is required for the retrieval backend")
        return RetrievalBackend(RetrievalIndex.build(_index_items(index)))
    if backend == "remote":
        if not endpoint:
            raise click.UsageError("--endpoint is required for the remote backend")
        return RemoteBackend(endpoint)
    raise click.UsageError(f"unknown backend {backend!r}")


def _parse_ratios(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise click.UsageError(f"--split needs three comma-separated ratios, got {text!r}")
    try:
        ratios = tuple(float(p) for p in parts)
    except ValueError:
        raise click.UsageError(f"--split ratios must be numbers, got {text!r}")
    return ratios


@click.group()
def cli():
    """Issue report template toolkit: preprocess corpora, build instruction
    datasets, generate templates, and evaluate generators."""


@cli.command("ingest")
@click.argument("source")
@click.option("-o", "--out", default=None, help="Output JSONL (default stdout).")
def ingest_cmd(source, out):
    """Read a corpus (JSONL file or directory of .md files) into JSONL rows."""
    records = ingest(source)
    with _open_out(out) as stream:
        write_corpus_jsonl(records, stream, with_canonical=False)


@cli.command("preprocess")
@click.argument("source")
@click.option("-o", "--out", default=None, help="Output JSONL (default stdout).")
@click.option("--latin-threshold", type=float, default=DEFAULT_LATIN_THRESHOLD,
              show_default=True, help="Minimum Latin-script letter fraction.")
@click.option("--stats-out", default=None, help="Write stage statistics JSON here "
              "(default: stderr).")
@click.option("--figures-dir", default=None, help="Also render a stage-survival figure here.")
def preprocess_cmd(source, out, latin_threshold, stats_out, figures_dir):
    """Run all five preprocessing stages over a corpus."""
    overrides = _config_overrides()
    latin_threshold = _cfg(overrides, "latin_threshold", latin_threshold, float)
    records = ingest(source)
    records, stats = run_pipeline(records, latin_threshold=latin_threshold)
    with _open_out(out) as stream:
        write_corpus_jsonl(records, stream)
    stats_json = json.dumps(stats_to_json(stats), indent=2)
    if stats_out:
        Path(stats_out).write_text(stats_json + "\n", encoding="utf-8")
    else:
        print(stats_json, file=sys.stderr)
    if figures_dir:
        fig_dir = Path(figures_dir)
        fig_dir.mkdir(parents=True, exist_ok=True)
        render_stats_figure(stats, fig_dir / "pipeline_stages.png")


@cli.command("build-instruct")
@click.argument("source")
@click.option("-o", "--out", required=True, help="Output dataset JSONL.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--summarizer", type=click.Choice(["stub", "remote"]), default="stub",
              show_default=True)
@click.option("--summarizer-endpoint", default=None,
              help="Summary endpoint URL (remote summarizer only).")
@click.option("--split", "split_ratios", default="0.8,0.1,0.1", show_default=True,
              help="train,validation,test ratios.")
def build_instruct_cmd(source, out, seed, summarizer, summarizer_endpoint, split_ratios):
    """Expand a preprocessed corpus into the four-variant instruction dataset."""
    overrides = _config_overrides()
    seed = _cfg(overrides, "seed", seed, int)
    summarizer = _cfg(overrides, "summarizer", summarizer)
    split_ratios = _cfg(overrides, "split", split_ratios)
    ratios = _parse_ratios(split_ratios)

    if summarizer == "remote":
        if not summarizer_endpoint:
            raise click.UsageError("--summarizer-endpoint is required with --summarizer remote")
        backend = RemoteSummarizer(summarizer_endpoint)
    else:
        backend = StubSummarizer()
    stub = StubSummarizer()

    pairs = []
    summary_sources = set()
    for row in _read_rows(source):
        text = row.get("canonical") or row.get("content") or ""
        irt = parse_irt(text)
        canonical = render_irt(irt)
        try:
            summary = backend.summarize(canonical)
            summary_sources.add(backend.kind)
        except GirtForgeError as exc:
            click.echo(f"warning: summarizer failed for {row.get('id')}: {exc}; "
                       "falling back to stub", err=True)
            summary = stub.summarize(canonical)
            summary_sources.add(stub.kind)
        pairs.extend(expand_variants(irt, summary, seed, str(row.get("id"))))
    pairs = split_dataset(pairs, ratios, seed)

    with open(out, "w", encoding="utf-8") as stream:
        for pair in pairs:
            stream.write(json.dumps(pair_to_row(pair), ensure_ascii=False) + "\n")
    provenance = {
        "seed": seed,
        "summarizer": sorted(summary_sources),
        "split_ratios": list(ratios),
        "irt_count": len({p.irt_id for p in pairs}),
        "pair_count": len(pairs),
    }
    Path(out + ".provenance.json").write_text(
        json.dumps(provenance, indent=2) + "\n", encoding="utf-8"
    )


@cli.command("sample")
@click.argument("pairs_file")
@click.option("--k", type=int, default=10, show_default=True, help="Clusters per variant.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--split", default="test", show_default=True)
@click.option("-o", "--out", default=None, help="Output JSON (default stdout).")
def sample_cmd(pairs_file, k, seed, split, out):
    """Pick one evaluation pair per TF-IDF k-means cluster, per variant."""
    overrides = _config_overrides()
    k = _cfg(overrides, "k", k, int)
    seed = _cfg(overrides, "seed", seed, int)
    pairs = [p for p in _read_pairs(pairs_file) if p.split == split]
    groups: dict[str, list] = {}
    for pair in pairs:
        groups.setdefault(pair.variant, []).append(pair)
    sampled = stratified_sample(groups, k=k, seed=seed)
    payload = json.dumps([pair.id for pair in sampled], indent=2)
    with _open_out(out) as stream:
        stream.write(payload + "\n")


def _decoding_options(func):
    func = click.option("--max-length", type=int, default=512, show_default=True)(func)
    func = click.option("--min-length", type=int, default=0, show_default=True)(func)
    func = click.option("--top-p", type=float, default=0.95, show_default=True)(func)
    func = click.option("--top-k", type=int, default=50, show_default=True)(func)
    return func


def _decoding(max_length, min_length, top_p, top_k) -> DecodingConfig:
    try:
        return DecodingConfig(max_length=max_length, min_length=min_length,
                              top_p=top_p, top_k=top_k)
    except ValueError as exc:
        raise click.UsageError(str(exc))


@cli.command("generate")
@click.option("--instruction-file", required=True,
              help="File holding one serialized instruction block.")
@click.option("--backend", type=click.Choice(["retrieval", "remote"]), default="retrieval",
              show_default=True)
@click.option("--index", default=None, help="Corpus JSONL or template directory "
              "backing the retrieval index.")
@click.option("--endpoint", default=None, help="Remote backend URL.")
@_decoding_options
@click.option("-o", "--out", default=None, help="Write the template here (default stdout).")
def generate_cmd(instruction_file, backend, index, endpoint,
                 max_length, min_length, top_p, top_k, out):
    """Generate one template from a serialized instruction."""
    overrides = _config_overrides()
    backend = _cfg(overrides, "backend", backend)
    index = _cfg(overrides, "index", index)
    endpoint = _cfg(overrides, "endpoint", endpoint)
    try:
        text = Path(instruction_file).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {instruction_file}: {exc}") from exc
    instruction = parse_instruction(text.rstrip("\n"))
    gen = _build_backend(backend, index, endpoint)
    output = gen.generate(instruction, _decoding(max_length, min_length, top_p, top_k))
    with _open_out(out) as stream:
        stream.write(output)


@cli.command("evaluate")
@click.argument("pairs_file")
@click.option("--backend", type=click.Choice(["retrieval", "remote"]), default="retrieval",
              show_default=True)
@click.option("--index", default=None)
@click.option("--endpoint", default=None)
@click.option("--split", default="test", show_default=True)
@click.option("--report-dir", default=None,
              help="Write report.json, report.tsv, and report.png here.")
@_decoding_options
def evaluate_cmd(pairs_file, backend, index, endpoint, split, report_dir,
                 max_length, min_length, top_p, top_k):
    """Score a backend against a dataset split, per instruction variant."""
    overrides = _config_overrides()
    backend = _cfg(overrides, "backend", backend)
    index = _cfg(overrides, "index", index)
    endpoint = _cfg(overrides, "endpoint", endpoint)
    pairs = [p for p in _read_pairs(pairs_file) if p.split == split]
    if not pairs:
        raise DataError(f"no pairs with split {split!r} in {pairs_file}")
    gen = _build_backend(backend, index, endpoint)
    report = evaluate(gen, pairs, _decoding(max_length, min_length, top_p, top_k))
    click.echo(format_report_table(report))
    click.echo(json.dumps(report_to_json(report), indent=2))
    if report_dir:
        paths = write_report_files(report, report_dir)
        click.echo("wrote " + ", ".join(str(p) for p in paths), err=True)


@cli.command("serve")
@click.option("--bind", default="127.0.0.1:8323", show_default=True, help="host:port.")
@click.option("--backend", type=click.Choice(["retrieval", "remote"]), default="retrieval",
              show_default=True)
@click.option("--index", default=None)
@click.option("--endpoint", default=None)
@click.option("--cors-origin", "cors_origins", multiple=True,
              help="Allowed CORS origin (repeatable).")
@_decoding_options
def serve_cmd(bind, backend, index, endpoint, cors_origins,
              max_length, min_length, top_p, top_k):
    """Serve generation and validation over HTTP."""
    import uvicorn

    overrides = _config_overrides()
    bind = _cfg(overrides, "bind", bind)
    backend = _cfg(overrides, "backend", backend)
    index = _cfg(overrides, "index", index)
    endpoint = _cfg(overrides, "endpoint", endpoint)
    if "cors_origins" in overrides:
        value = overrides["cors_origins"]
        cors_origins = value.split(",") if isinstance(value, str) else list(value)
    try:
        config = ServiceConfig(
            bind_address=bind,
            backend_kind=backend,
            index_path=index or "",
            endpoint_url=endpoint or "",
            default_decoding=_decoding(max_length, min_length, top_p, top_k),
            cors_allowed_origins=list(cors_origins),
        )
    except ValueError as exc:
        raise click.UsageError(str(exc))
    gen = _build_backend(backend, index, endpoint)
    app = create_app(gen, config.default_decoding, config.cors_allowed_origins)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return 1
    except DataError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except GirtForgeError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
