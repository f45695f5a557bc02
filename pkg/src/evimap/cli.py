"""Command-line interface: ingestion, serving, training, evaluation, export."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .corpus import CorpusError, read_feed
from .evmap import Query, aggregate, filter_documents, serialize_map
from .features import FeatureConfig, LabeledExample
from .fixtures import write_fixture_files
from .gate import RCT_CLASSES, gate as gate_doc
from .linear import LinearModel, TrainConfig, train
from .normalize import build_dictionary, read_synonym_table
from .ontology import load_ontology
from .pipeline import Components, PipelineConfig, contributions_from_store, run_pipeline
from .store import Store


@click.group()
def main():
    """Trial-abstract evidence extraction and evidence maps."""


def _components(config: PipelineConfig) -> Components:
    return Components.default(config)


def _load_config(config_path) -> PipelineConfig:
    return PipelineConfig.load(config_path) if config_path else PipelineConfig()


@main.command()
@click.argument("feed", type=click.Path(exists=True))
@click.option("--store", "store_path", default="evimap-store", show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def ingest(feed, store_path, config_path):
    """Run the extraction pipeline over a newline-delimited corpus feed."""
    config = _load_config(config_path)
    store = Store(store_path)
    report = run_pipeline(feed, store, _components(config), config)
    click.echo(json.dumps(report.to_dict(), indent=2))
    sys.exit(1 if report.received == 0 else 0)


@main.command()
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--store", "store_path", default="evimap-store", show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def serve(port, host, store_path, config_path):
    """Serve the HTTP API over an ingested store."""
    import uvicorn

    from .api import create_app

    config = _load_config(config_path)
    components = _components(config)
    app = create_app(Store(store_path), components.ontology)
    uvicorn.run(app, host=host, port=port)


@main.command()
@click.argument("feed", type=click.Path(exists=True))
@click.option("--threshold", default=0.5, show_default=True)
@click.option("--model", "model_path", default=None,
              help="Path to a trained RCT model; defaults to the rule baseline.")
def gate(feed, threshold, model_path):
    """Emit one gate decision per feed document as JSON lines."""
    if model_path:
        from .backends import LinearBackend

        classifier = LinearBackend(LinearModel.load(model_path))
    else:
        from .pipeline import default_rct_classifier

        classifier = default_rct_classifier()
    for _lineno, item in read_feed(feed):
        if isinstance(item, CorpusError):
            click.echo(json.dumps({"error": str(item)}))
            continue
        decision = gate_doc(item, classifier, threshold)
        click.echo(
            json.dumps(
                {
                    "doc_id": decision.doc_id,
                    "probability": decision.probability,
                    "is_rct": decision.is_rct,
                    "threshold_used": decision.threshold_used,
                }
            )
        )


@main.command("build-dict")
@click.option("--ontology", "ontology_path", required=True, type=click.Path(exists=True))
@click.option("--synonyms", "synonyms_path", type=click.Path(exists=True), default=None)
@click.option("--report", "report_path", type=click.Path(), default=None)
def build_dict(ontology_path, synonyms_path, report_path):
    """Validate and build the synonym dictionary, reporting rejected rows."""
    ontology = load_ontology(ontology_path)
    extra = read_synonym_table(synonyms_path) if synonyms_path else []
    dictionary, rejected = build_dictionary(ontology, extra)
    summary = {
        "concepts": len(ontology.concepts),
        "keys": dictionary.n_keys,
        "rejected_rows": rejected,
    }
    if report_path:
        Path(report_path).write_text(json.dumps(summary, indent=2) + "\n")
    click.echo(json.dumps(summary, indent=2))


@main.command()
@click.option("--task", required=True)
@click.option("--data", "data_path", required=True, type=click.Path(exists=True),
              help="JSON lines: {segments: [...], label: <class name>}")
@click.option("--classes", required=True, help="Comma-separated class names, fixed order.")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--epochs", default=20, show_default=True)
@click.option("--learning-rate", default=0.1, show_default=True)
@click.option("--l2", default=0.0, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--mode", default="stochastic", type=click.Choice(["stochastic", "full"]))
@click.option("--hash-bits", default=20, show_default=True)
def train_cmd(task, data_path, classes, out_path, epochs, learning_rate, l2, seed, mode, hash_bits):
    """Train the native linear classifier for a task."""
    class_list = [c.strip() for c in classes.split(",") if c.strip()]
    examples = []
    for line in Path(data_path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        raw = json.loads(line)
        examples.append(
            LabeledExample(tuple(raw["segments"]), class_list.index(raw["label"]))
        )
    model = train(
        examples,
        class_list,
        TrainConfig(epochs=epochs, learning_rate=learning_rate, l2=l2, seed=seed, mode=mode),
        FeatureConfig(hash_bits=hash_bits),
        task=task,
    )
    model.save(out_path)
    click.echo(f"saved {task} model ({len(examples)} examples) to {out_path}")


main.add_command(train_cmd, name="train")


@main.command("export-map")
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--query", "query_json", required=True,
              help='JSON query, e.g. {"population": {"concept_ids": ["C003"], "mode": "or"}}')
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def export_map(store_path, query_json, out_path, config_path):
    """Filter, aggregate, and serialize an evidence map."""
    config = _load_config(config_path)
    components = _components(config)
    store = Store(store_path)
    query = Query.from_dict(json.loads(query_json))
    doc_ids = filter_documents(store.doc_concepts(), query, components.ontology)
    emap = aggregate(contributions_from_store(store, doc_ids))
    payload = serialize_map(emap, components.ontology)
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out_path:
        Path(out_path).write_text(text + "\n")
    else:
        click.echo(text)


@main.command("eval")
@click.option("--task", required=True,
              type=click.Choice(["pico", "evidence", "direction", "concepts"]))
@click.option("--pred", "pred_path", required=True, type=click.Path(exists=True))
@click.option("--gold", "gold_path", required=True, type=click.Path(exists=True))
@click.option("--feed", "feed_path", required=True, type=click.Path(exists=True))
@click.option("--relaxed", is_flag=True, default=False)
@click.option("--mode", default="gold_prompts",
              type=click.Choice(["gold_prompts", "predicted_prompts"]))
@click.option("--ontology", "ontology_path", type=click.Path(exists=True), default=None)
@click.option("--synonyms", "synonyms_path", type=click.Path(exists=True), default=None)
@click.option("--report", "report_path", type=click.Path(), default=None)
def eval_cmd(task, pred_path, gold_path, feed_path, relaxed, mode,
             ontology_path, synonyms_path, report_path):
    """Score prediction files against gold annotations."""
    from . import reports

    if task == "pico":
        report = reports.pico_eval_report(pred_path, gold_path, feed_path)
    elif task == "evidence":
        report = reports.evidence_eval_report(pred_path, gold_path, feed_path)
    elif task == "direction":
        report = reports.direction_eval_report(pred_path, gold_path, feed_path, mode)
    else:
        if ontology_path:
            ontology = load_ontology(ontology_path, synonyms_path)
        else:
            from .fixtures import fixture_ontology

            ontology = fixture_ontology()
        report = reports.concepts_eval_report(
            pred_path, gold_path, feed_path, ontology, relaxed=relaxed
        )
    text = json.dumps(report, indent=2, sort_keys=True)
    if report_path:
        Path(report_path).write_text(text + "\n")
    click.echo(text)


@main.command("export-fixtures")
@click.option("--out", "out_dir", default="fixtures", show_default=True)
def export_fixtures(out_dir):
    """Write the bundled demo corpus, gold annotations, and tables to a directory."""
    paths = write_fixture_files(out_dir)
    for name, path in paths.items():
        click.echo(f"{name}: {path}")


if __name__ == "__main__":
    main()
