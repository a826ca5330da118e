import os
from pathlib import Path

from jinja2 import Environment, FileSystemLoader

from cautious.models.report import ConfusionCounts
from cautious.renderer.manifest import RenderManifest


def _environment() -> Environment:
    template_dir = os.path.join(os.path.dirname(__file__), "templates")
    env = Environment(loader=FileSystemLoader(template_dir), trim_blocks=True, lstrip_blocks=True)
    env.filters["hyphen"] = ConfusionCounts.hyphen
    env.filters["columns"] = lambda cols: ", ".join(str(c) for c in cols) or "(none)"
    return env


def render_markdown(manifest: RenderManifest) -> str:
    return _environment().get_template("report.md.j2").render(manifest=manifest, report=manifest.report)


def render_to_markdown(manifest: RenderManifest, output_path: str | Path) -> Path:
    """Renders the human-readable report next to the JSON one."""
    output_path = Path(output_path)
    output_path.write_text(render_markdown(manifest), encoding="utf-8")
    return output_path
