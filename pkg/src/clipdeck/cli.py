"""Command-line entry points: serve, export, import, stats."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .errors import ClipdeckError
from .persistence import DataDir
from .service import ClipdeckService, create_app
from .stats import annotation_table_csv, corpus_report, stats_from_snapshot

DEFAULT_DATA_DIR = "~/.clipdeck"

data_dir_option = click.option(
    "--data-dir",
    "data_dir",
    envvar="CLIPDECK_DATA_DIR",
    default=DEFAULT_DATA_DIR,
    show_default=True,
    help="Where journals, checkpoints, and assets live.",
)


def _open(data_dir: str) -> tuple[DataDir, object]:
    home = DataDir(Path(data_dir).expanduser())
    return home, home.open_store()


@click.group()
@click.version_option(package_name="clipdeck")
def main() -> None:
    """Local-first clipping service: capture, organize, and keep provenance."""


@main.command()
@data_dir_option
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8765, show_default=True, type=int)
def serve(data_dir: str, host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    _, store = _open(data_dir)
    app = create_app(ClipdeckService(store))
    uvicorn.run(app, host=host, port=port)


@main.command()
@click.argument("project_id")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
@data_dir_option
def export(project_id: str, output: str | None, data_dir: str) -> None:
    """Write a project snapshot to a file or stdout."""
    _, store = _open(data_dir)
    try:
        data = store.export_bytes(project_id)
    except ClipdeckError as exc:
        raise click.ClickException(str(exc)) from exc
    if output:
        Path(output).write_bytes(data)
        click.echo(f"wrote {len(data)} bytes to {output}")
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.write(b"\n")


@main.command(name="import")
@click.argument("snapshot_file", type=click.Path(exists=True, dir_okay=False))
@data_dir_option
def import_snapshot(snapshot_file: str, data_dir: str) -> None:
    """Create a new project from a snapshot file."""
    _, store = _open(data_dir)
    try:
        snapshot = json.loads(Path(snapshot_file).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise click.ClickException(f"not valid JSON: {exc}") from exc
    try:
        project = store.import_project(snapshot)
    except ClipdeckError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"imported project {project.id} ({store.card_count(project.id)} cards)")


@main.command()
@click.argument("path", type=click.Path(exists=True))
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None,
              help="Also write the annotation-length table as CSV.")
def stats(path: str, csv_path: str | None) -> None:
    """Report structure stats for a snapshot file or a whole data directory."""
    from .stats import project_stats

    target = Path(path)
    entries = []
    per_project = []
    if target.is_dir():
        _, store = _open(str(target))
        for project in store.list_projects():
            stat = project_stats(store, project.id)
            per_project.append(stat)
            entries.append(
                {"project_id": project.id, "name": project.name, "stats": stat.to_dict()}
            )
    else:
        try:
            snapshot = json.loads(target.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise click.ClickException(f"not valid JSON: {exc}") from exc
        try:
            stat = stats_from_snapshot(snapshot)
        except (ClipdeckError, KeyError, TypeError, ValueError) as exc:
            raise click.ClickException(f"not a usable snapshot: {exc}") from exc
        per_project.append(stat)
        entries.append(
            {
                "project_id": snapshot["project"]["id"],
                "name": snapshot["project"]["name"],
                "stats": stat.to_dict(),
            }
        )
    report = corpus_report(per_project)
    click.echo(json.dumps({"projects": entries, "corpus": report.to_dict()}, indent=2))
    if csv_path:
        Path(csv_path).write_text(annotation_table_csv(report), encoding="utf-8")
        click.echo(f"wrote annotation table to {csv_path}", err=True)


if __name__ == "__main__":
    main()
