"""Command-line interface.

Thin wrappers over the library: each subcommand parses arguments, delegates,
and prints. Machine-consumable output (reports, CSV rows, summary lines)
goes to stdout; diagnostics go to stderr. Exit codes: 0 success, 1 domain
error, 2 usage error.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import __version__
from .bench import (
    append_report,
    make_query_set,
    run_accuracy,
    run_latency,
    run_robustness,
    run_scalability,
)
from .config import SimilarityConfig, load_config
from .data import (
    bundled_claims_path,
    bundled_chapters_path,
    bundled_ontology_path,
    bundled_paraphrases_path,
)
from .errors import DomainError
from .flatten import check_reachability, flatten_to_fixpoint, persist
from .hybrid import predict_hybrid
from .ontology import Ontology, load_chapter_ranges, parse_ontology_file
from .pipeline import (
    PREDICTORS,
    DISEASE,
    QueryEngine,
    QueryResult,
    load_claims,
    render_expr,
)
from .predictor import predict_default, promote_tokens
from .synthetic import make_synthetic_ontology
from .textproc import clean


def domain_errors(fn):
    """Map DomainError to an stderr message and exit code 1."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except DomainError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _load_cfg(config_path: str | None) -> SimilarityConfig:
    return load_config(config_path) if config_path else SimilarityConfig()


def _predictor_option(fn):
    return click.option(
        "--predictor",
        type=click.Choice(sorted(PREDICTORS)),
        default="hybrid",
        show_default=True,
        help="Predictor used to resolve disease text to codes.",
    )(fn)


def _config_option(fn):
    return click.option(
        "--config",
        "config_path",
        type=click.Path(exists=True, dir_okay=False),
        default=None,
        help="key=value similarity config file.",
    )(fn)


@click.group()
@click.version_option(version=__version__, prog_name="clinsearch")
def main() -> None:
    """Hierarchical clinical code search and claims filtering."""


@main.command()
@click.argument("ontology", type=click.Path(exists=True, dir_okay=False))
@_config_option
@domain_errors
def validate(ontology: str, config_path: str | None) -> None:
    """Parse an ontology TSV and check its structural invariants."""
    o = parse_ontology_file(ontology, _load_cfg(config_path))
    o.validate()
    click.echo(
        f"{o.name}: {len(o)} nodes, {len(o.roots())} roots, max depth {o.max_depth()}"
    )


@main.command()
@click.argument("input_tsv", type=click.Path(exists=True, dir_okay=False))
@click.argument("output_tsv", type=click.Path(dir_okay=False, writable=True))
@click.option(
    "--predictor",
    type=click.Choice(sorted(PREDICTORS)),
    default="default",
    show_default=True,
    help="Predictor used for the before/after reachability check.",
)
@_config_option
@domain_errors
def flatten(input_tsv: str, output_tsv: str, predictor: str, config_path: str | None) -> None:
    """Flatten an ontology to its fixpoint and write the result."""
    cfg = _load_cfg(config_path)
    original = parse_ontology_file(input_tsv, cfg)
    predict = PREDICTORS[predictor]
    before = len(check_reachability(original, predict, cfg))
    flattened, passes = flatten_to_fixpoint(original)
    after = len(check_reachability(flattened, predict, cfg))
    persist(flattened, output_tsv)
    click.echo(
        f"passes={passes} nodes={len(flattened)} "
        f"unreachable_before={before} unreachable_after={after}"
    )


@main.command()
@click.argument("ontology", type=click.Path(exists=True, dir_okay=False))
@_config_option
@domain_errors
def promote(ontology: str, config_path: str | None) -> None:
    """Report what promoting child tokens into root descriptions changes.

    Promoted token sets cannot be persisted (the TSV carries descriptions
    only), so this emits a report; use --promote on query/repl to apply
    promotion in memory.
    """
    cfg = _load_cfg(config_path)
    original = parse_ontology_file(ontology, cfg)
    promoted = promote_tokens(original, cfg)
    roots_touched = 0
    tokens_added = 0
    for code in original.roots():
        added = len(promoted.nodes[code].tokens.tokens) - len(original.nodes[code].tokens.tokens)
        if added:
            roots_touched += 1
            tokens_added += added
    before = len(check_reachability(original, predict_default, cfg))
    after = len(check_reachability(promoted, predict_default, cfg))
    click.echo(
        f"roots_augmented={roots_touched} tokens_added={tokens_added} "
        f"unreachable_before={before} unreachable_after={after}"
    )


def _build_engine(
    ontology_path: str | None,
    claims_path: str | None,
    ranges_path: str | None,
    config_path: str | None,
    predictor: str,
    apply_promotion: bool,
) -> QueryEngine:
    cfg = _load_cfg(config_path)
    o = parse_ontology_file(ontology_path or bundled_ontology_path(), cfg)
    if apply_promotion:
        o = promote_tokens(o, cfg)
    claims = load_claims(claims_path) if claims_path else None
    ranges = load_chapter_ranges(ranges_path) if ranges_path else None
    return QueryEngine(o, cfg, predictor=predictor, claims=claims, ranges=ranges)


_ROW_COLUMNS = ("patient_id", "state", "age", "sex", "diagnosis_codes", "drug_codes")


def _row_cells(row) -> list[str]:
    return [
        row.patient_id,
        row.state,
        str(row.age),
        row.sex,
        "|".join(row.diagnosis_codes),
        "|".join(row.drug_codes),
    ]


def _print_result(result: QueryResult, fmt: str) -> None:
    click.echo(f"filter: {render_expr(result.expression)}", err=True)
    for text, codes in result.families.items():
        click.echo(f"family[{text}]: {len(codes)} codes", err=True)
    if fmt == "csv":
        click.echo(",".join(_ROW_COLUMNS))
        for row in result.rows:
            click.echo(",".join(_row_cells(row)))
    else:
        rows = [_row_cells(row) for row in result.rows]
        widths = [
            max(len(_ROW_COLUMNS[i]), *(len(r[i]) for r in rows)) if rows else len(_ROW_COLUMNS[i])
            for i in range(len(_ROW_COLUMNS))
        ]
        click.echo("  ".join(name.ljust(widths[i]) for i, name in enumerate(_ROW_COLUMNS)))
        for cells in rows:
            click.echo("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(cells)))
    click.echo(f"rows: {result.row_count} ({result.elapsed_ms:.2f} ms)", err=True)


def _print_families_only(engine: QueryEngine, question: str) -> None:
    fragments, expr = engine.plan(question)
    click.echo(f"filter: {render_expr(expr)}", err=True)
    click.echo("fragment,code")
    for fragment in fragments:
        if fragment.kind == DISEASE:
            for code in sorted(engine.resolve(fragment.text)):
                click.echo(f"{clean(fragment.text)},{code}")


@main.command()
@click.argument("question")
@click.option("--ontology", "ontology_path", type=click.Path(exists=True, dir_okay=False), default=None, help="Ontology TSV (defaults to the bundled sample).")
@click.option("--claims", "claims_path", type=click.Path(exists=True, dir_okay=False), default=None, help="Claims CSV; omit to only resolve code families.")
@click.option("--ranges", "ranges_path", type=click.Path(exists=True, dir_okay=False), default=None, help="Chapter ranges CSV for chapter-title phrases.")
@_config_option
@_predictor_option
@click.option("--promote", "apply_promotion", is_flag=True, help="Promote child tokens into roots before searching.")
@click.option("--format", "fmt", type=click.Choice(["table", "csv"]), default="table", show_default=True)
@domain_errors
def query(
    question: str,
    ontology_path: str | None,
    claims_path: str | None,
    ranges_path: str | None,
    config_path: str | None,
    predictor: str,
    apply_promotion: bool,
    fmt: str,
) -> None:
    """Answer one natural-language question."""
    engine = _build_engine(
        ontology_path, claims_path, ranges_path, config_path, predictor, apply_promotion
    )
    if engine.claims is None:
        _print_families_only(engine, question)
    else:
        _print_result(engine.ask(question), fmt)


@main.command()
@click.option("--ontology", "ontology_path", type=click.Path(exists=True, dir_okay=False), default=None, help="Ontology TSV (defaults to the bundled sample).")
@click.option("--claims", "claims_path", type=click.Path(exists=True, dir_okay=False), default=None, help="Claims CSV (defaults to the bundled sample).")
@click.option("--ranges", "ranges_path", type=click.Path(exists=True, dir_okay=False), default=None, help="Chapter ranges CSV.")
@_config_option
@_predictor_option
@click.option("--promote", "apply_promotion", is_flag=True, help="Promote child tokens into roots before searching.")
@click.option("--format", "fmt", type=click.Choice(["table", "csv"]), default="table", show_default=True)
@domain_errors
def repl(
    ontology_path: str | None,
    claims_path: str | None,
    ranges_path: str | None,
    config_path: str | None,
    predictor: str,
    apply_promotion: bool,
    fmt: str,
) -> None:
    """Interactive loop; the ontology and claims stay loaded between questions."""
    engine = _build_engine(
        ontology_path,
        claims_path or str(bundled_claims_path()),
        ranges_path,
        config_path,
        predictor,
        apply_promotion,
    )
    click.echo(
        f"loaded {engine.ontology.name}: {len(engine.ontology)} nodes, "
        f"{len(engine.claims) if engine.claims else 0} claims rows. "
        "Type a question, or 'exit'.",
        err=True,
    )
    while True:
        try:
            question = input("clinsearch> ").strip()
        except (EOFError, KeyboardInterrupt):
            break
        if not question:
            continue
        if question.lower() in ("exit", "quit"):
            break
        try:
            _print_result(engine.ask(question), fmt)
        except DomainError as exc:
            click.echo(f"error: {exc}", err=True)


@main.group()
def bench() -> None:
    """Accuracy, robustness, latency and scalability experiments."""


def _emit_report(report, out: str | None) -> None:
    click.echo(json.dumps(report.to_dict(), sort_keys=True))
    if out:
        append_report(report, out)


def _bench_ontology(ontology_path: str | None, synthetic: int | None, cfg: SimilarityConfig) -> Ontology:
    if synthetic:
        return make_synthetic_ontology(synthetic)
    return parse_ontology_file(ontology_path or bundled_ontology_path(), cfg)


_VARIANT_CHOICES = click.Choice(["default", "flattened", "hybrid", "hybrid+flattened"])


@bench.command("accuracy")
@click.option("--ontology", "ontology_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--synthetic", type=int, default=None, help="Generate a synthetic ontology of N nodes instead of reading one.")
@click.option("--variant", type=_VARIANT_CHOICES, default="default", show_default=True)
@click.option("--level", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None, help="NDJSON report file to append to.")
@_config_option
@domain_errors
def bench_accuracy(ontology_path, synthetic, variant, level, out, config_path) -> None:
    """Self-description accuracy at one level."""
    cfg = _load_cfg(config_path)
    o = _bench_ontology(ontology_path, synthetic, cfg)
    _emit_report(run_accuracy(o, level, variant, cfg), out)


@bench.command("robustness")
@click.option("--ontology", "ontology_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--paraphrases", "paraphrases_path", type=click.Path(exists=True, dir_okay=False), default=None, help="Paraphrase fixture TSV (defaults to the bundled set).")
@click.option("--variant", type=_VARIANT_CHOICES, default="default", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None)
@_config_option
@domain_errors
def bench_robustness(ontology_path, paraphrases_path, variant, out, config_path) -> None:
    """Accuracy over the frozen paraphrase fixture."""
    cfg = _load_cfg(config_path)
    o = _bench_ontology(ontology_path, None, cfg)
    fixture = paraphrases_path or bundled_paraphrases_path()
    _emit_report(run_robustness(o, fixture, variant, cfg), out)


@bench.command("latency")
@click.option("--ontology", "ontology_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--synthetic", type=int, default=None)
@click.option("--variant", type=_VARIANT_CHOICES, default="default", show_default=True)
@click.option("--level", type=int, default=1, show_default=True)
@click.option("--queries", "query_cap", type=int, default=None, help="Cap the query set size.")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None)
@_config_option
@domain_errors
def bench_latency(ontology_path, synthetic, variant, level, query_cap, out, config_path) -> None:
    """Wall time to answer every level-N description."""
    cfg = _load_cfg(config_path)
    o = _bench_ontology(ontology_path, synthetic, cfg)
    queries = make_query_set(o, level)
    if query_cap:
        queries = queries[:query_cap]
    _emit_report(run_latency(o, queries, variant, cfg), out)


@bench.command("scalability")
@click.option("--ontology", "ontology_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--synthetic", type=int, default=None)
@click.option("--variant", type=click.Choice(["default", "hybrid"]), default="default", show_default=True)
@click.option("--fractions", default="0.25,0.5,1.0", show_default=True, help="Comma-separated pre-order prefix fractions.")
@click.option("--queries", "query_cap", type=int, default=40, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None)
@_config_option
@domain_errors
def bench_scalability(ontology_path, synthetic, variant, fractions, query_cap, out, config_path) -> None:
    """Fixed query set timed against growing dataset prefixes."""
    cfg = _load_cfg(config_path)
    o = _bench_ontology(ontology_path, synthetic, cfg)
    try:
        parsed = tuple(float(f) for f in fractions.split(",") if f.strip())
    except ValueError:
        raise click.BadParameter(f"bad fractions {fractions!r}")
    if not parsed:
        raise click.BadParameter("no fractions given")
    _emit_report(run_scalability(o, parsed, variant, cfg, query_cap=query_cap), out)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--ontology", "ontology_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--claims", "claims_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--ranges", "ranges_path", type=click.Path(exists=True, dir_okay=False), default=None)
@_config_option
@_predictor_option
@domain_errors
def serve(host, port, ontology_path, claims_path, ranges_path, config_path, predictor) -> None:
    """Run the HTTP service (loads everything once, then serves)."""
    import uvicorn

    from .api import create_app

    app = create_app(ontology_path, claims_path, ranges_path, config_path, predictor)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
