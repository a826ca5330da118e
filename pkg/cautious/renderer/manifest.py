from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from cautious.models.posterior import Status
from cautious.models.report import SelectionReport


class RenderManifest(BaseModel):
    report: SelectionReport
    title: str = "Cautious variable selection"
    status_counts: Dict[str, int] = Field(default_factory=dict)
    comparison: List[Dict[str, str]] = Field(default_factory=list, description="Competitor rows read from CSV")


def create_manifest(
    report: SelectionReport, title: Optional[str] = None, comparison: Optional[List[Dict[str, str]]] = None
) -> RenderManifest:
    """Wraps a SelectionReport with the figures the report template prints."""
    return RenderManifest(
        report=report,
        title=title or RenderManifest.model_fields["title"].default,
        status_counts={s.value: report.count(s) for s in Status},
        comparison=comparison or [],
    )
