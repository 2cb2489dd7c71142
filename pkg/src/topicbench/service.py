"""HTTP corpus-generation service.

Stateless: a response is a pure function of the request body, and PUT
/v1/generate returns exactly the documents the library (and therefore the
CLI) produces for the same config and seed.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from .core import ConfigurationError
from .simgen import GeneratorConfig, generate_corpus
from .storage import default_dictionary

MAX_TOKENS = 10**8


class GenerateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    M: int = Field(ge=0)
    V: int = Field(ge=2)
    N: int = Field(ge=1)
    K: int = Field(ge=2)
    K_m: int = Field(ge=1)
    seed: int = Field(ge=0, le=2**64 - 1)
    shape: str = "laplace"
    overlap: float = 0.4
    function_fraction: float = 0.2
    function_block_fraction: float = 0.1
    include_ground_truth: bool = False

    def to_config(self) -> GeneratorConfig:
        data = self.model_dump()
        data.pop("include_ground_truth")
        return GeneratorConfig(**data)


class GroundTruthPayload(BaseModel):
    phi: list[list[float]]
    theta: list[list[float]]


class GenerateResponse(BaseModel):
    documents: list[list[int]]
    dictionary: dict[str, str]
    seed: int
    ground_truth: GroundTruthPayload | None = None


class _PayloadTooLarge(Exception):
    def __init__(self, tokens: int):
        self.tokens = tokens


def create_app() -> FastAPI:
    app = FastAPI(title="topicbench corpus generator", version="0.1.0")

    @app.exception_handler(RequestValidationError)
    async def _validation_handler(request: Request, exc: RequestValidationError):
        errors = exc.errors()
        if any(e.get("type") == "json_invalid" for e in errors):
            return JSONResponse(
                status_code=400,
                content={"code": "malformed_json", "message": "request body is not valid JSON"},
            )
        details = "; ".join(
            f"{'.'.join(str(p) for p in e['loc'] if p != 'body')}: {e['msg']}" for e in errors
        )
        return JSONResponse(
            status_code=422,
            content={"code": "invalid_config", "message": details},
        )

    @app.exception_handler(_PayloadTooLarge)
    async def _too_large_handler(request: Request, exc: _PayloadTooLarge):
        return JSONResponse(
            status_code=413,
            content={
                "code": "payload_too_large",
                "message": f"request implies {exc.tokens} tokens; limit is {MAX_TOKENS}",
            },
        )

    @app.get("/v1/health")
    async def health():
        return {"status": "ok"}

    @app.put("/v1/generate", response_model=GenerateResponse, response_model_exclude_none=True)
    async def generate(req: GenerateRequest):
        tokens = req.M * req.N
        if tokens > MAX_TOKENS:
            raise _PayloadTooLarge(tokens)
        try:
            config = req.to_config()
        except ConfigurationError as err:
            return JSONResponse(
                status_code=422,
                content={"code": "invalid_config", "message": str(err)},
            )
        corpus, truth = generate_corpus(config)
        ground_truth = None
        if req.include_ground_truth:
            ground_truth = GroundTruthPayload(
                phi=truth.phi.tolist(), theta=truth.theta.tolist()
            )
        return GenerateResponse(
            documents=[doc.tolist() for doc in corpus.docs],
            dictionary=default_dictionary(corpus.V),
            seed=corpus.seed,
            ground_truth=ground_truth,
        )

    return app


app = create_app()
