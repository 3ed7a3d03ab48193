"""HTTP service wrapping the search engine and the query pipeline.

The service is the long-running face of the package: the ontology and the
claims table are loaded once at startup and shared by every request, which
is safe because both are immutable and the only mutable state (the resolved
code-family cache) tolerates racing writers. The CLI covers the same
operations for one-shot use.
"""

from __future__ import annotations

import functools
import os
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .config import SimilarityConfig, load_config
from .data import bundled_chapters_path, bundled_claims_path, bundled_ontology_path
from .errors import DomainError, UnknownCode
from .hybrid import predict_hybrid
from .ontology import load_chapter_ranges, parse_ontology_file
from .pipeline import PREDICTORS, QueryEngine, load_claims, render_expr


class HealthResponse(BaseModel):
    status: str = Field(..., description="Always 'ok' when the service is up")
    dataset: str = Field(..., description="Name of the loaded ontology")
    nodes: int = Field(..., description="Number of codes in the ontology")
    claims_rows: int = Field(..., description="Rows in the claims table, 0 if none loaded")


class SearchRequest(BaseModel):
    query: str = Field(..., description="Free-text clinical query")
    predictor: Literal["default", "hybrid", "scan"] = Field(
        "hybrid", description="Which predictor answers the query"
    )
    seed: int = Field(0, description="Permutation seed for the hybrid flat scan")


class MatchModel(BaseModel):
    code: str
    description: str
    kind: str = Field(..., description="'exact' or 'approximate'")


class ScoreGroupModel(BaseModel):
    score: float
    matches: list[MatchModel]


class SearchResponse(BaseModel):
    status: str = Field(..., description="'found' or 'not_found'")
    best_score: float | None
    groups: list[ScoreGroupModel]


class QueryRequest(BaseModel):
    question: str = Field(..., description="Natural-language patient question")


class ClaimRowModel(BaseModel):
    patient_id: str
    state: str
    age: int
    sex: str
    diagnosis_codes: list[str]
    drug_codes: list[str]


class QueryResponse(BaseModel):
    question: str
    expression: str = Field(..., description="Normalized Boolean filter, rendered")
    families: dict[str, list[str]] = Field(
        ..., description="Resolved code family per disease fragment"
    )
    row_count: int
    rows: list[ClaimRowModel]
    elapsed_ms: float


class CodeFamilyResponse(BaseModel):
    code: str
    description: str
    depth: int
    parent: str | None
    children: list[str]
    descendants: list[str]


def create_app(
    ontology_path: str | Path | None = None,
    claims_path: str | Path | None = None,
    ranges_path: str | Path | None = None,
    config_path: str | Path | None = None,
    predictor: str = "hybrid",
) -> FastAPI:
    """Build the service with everything loaded up front.

    Unset paths fall back to environment variables (CLINSEARCH_ONTOLOGY,
    CLINSEARCH_CLAIMS, CLINSEARCH_RANGES, CLINSEARCH_CONFIG) and then to the
    bundled sample data.
    """
    # None means "fall back"; an empty string (parameter or environment
    # variable) disables that data source. A path that is set but missing
    # fails fast instead of silently loading nothing.
    ontology_path = ontology_path or os.environ.get("CLINSEARCH_ONTOLOGY") or bundled_ontology_path()
    if claims_path is None:
        claims_path = os.environ.get("CLINSEARCH_CLAIMS")
        if claims_path is None:
            claims_path = str(bundled_claims_path())
    if ranges_path is None:
        ranges_path = os.environ.get("CLINSEARCH_RANGES")
        if ranges_path is None:
            ranges_path = str(bundled_chapters_path())
    config_path = config_path or os.environ.get("CLINSEARCH_CONFIG")

    cfg = load_config(config_path) if config_path else SimilarityConfig()
    ontology = parse_ontology_file(ontology_path, cfg)
    claims = load_claims(claims_path) if claims_path else None
    ranges = load_chapter_ranges(ranges_path) if ranges_path else None
    engine = QueryEngine(ontology, cfg, predictor=predictor, claims=claims, ranges=ranges)

    app = FastAPI(title="clinsearch", version=__version__)

    @app.exception_handler(DomainError)
    async def domain_error_handler(_: Request, exc: DomainError) -> JSONResponse:
        status = 404 if isinstance(exc, UnknownCode) else 400
        return JSONResponse(status_code=status, content={"detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(
            status="ok",
            dataset=ontology.name,
            nodes=len(ontology),
            claims_rows=len(claims) if claims else 0,
        )

    @app.post("/search", response_model=SearchResponse)
    def search(request: SearchRequest) -> SearchResponse:
        predict = PREDICTORS[request.predictor]
        if request.predictor == "hybrid":
            predict = functools.partial(predict_hybrid, order_seed=request.seed)
        result = predict(request.query, ontology, cfg)
        groups = [
            ScoreGroupModel(
                score=score,
                matches=[MatchModel(code=e.code, description=e.description, kind=e.kind) for e in entries],
            )
            for score, entries in sorted(result.groups.items(), reverse=True)
        ]
        return SearchResponse(status=result.status, best_score=result.best_score, groups=groups)

    @app.post("/query", response_model=QueryResponse)
    def query(request: QueryRequest) -> QueryResponse:
        if engine.claims is None:
            return JSONResponse(  # type: ignore[return-value]
                status_code=400, content={"detail": "no claims table loaded"}
            )
        result = engine.ask(request.question)
        return QueryResponse(
            question=request.question,
            expression=render_expr(result.expression),
            families={text: list(codes) for text, codes in result.families.items()},
            row_count=result.row_count,
            rows=[
                ClaimRowModel(
                    patient_id=row.patient_id,
                    state=row.state,
                    age=row.age,
                    sex=row.sex,
                    diagnosis_codes=list(row.diagnosis_codes),
                    drug_codes=list(row.drug_codes),
                )
                for row in result.rows
            ],
            elapsed_ms=result.elapsed_ms,
        )

    @app.get("/codes/{code}", response_model=CodeFamilyResponse)
    def code_family(code: str) -> CodeFamilyResponse:
        node = ontology.node(code)
        return CodeFamilyResponse(
            code=node.code,
            description=node.description,
            depth=node.depth,
            parent=node.parent,
            children=list(ontology.children[node.code]),
            descendants=ontology.descendants(node.code),
        )

    return app
