"""HTTP service exposing instruction assembly, generation, and validation.

The UI (or any client) sends raw field values; MASK/EMPTY semantics are
applied here, server-side, so they live in exactly one place. Handlers
hold no mutable state: responses depend only on the request plus the
backend and configuration fixed at startup.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict

from .errors import BackendUnavailable, DataError, InvalidBackendOutput
from .generate import DecodingConfig, GeneratorBackend
from .instruct import (
    EMPTY_TOKEN,
    MASK_TOKEN,
    FieldValue,
    Instruction,
    serialize_instruction,
)
from .irt import IrtParseError, parse_irt, validate_irt


@dataclass
class ServiceConfig:
    bind_address: str = "127.0.0.1:8323"
    backend_kind: str = "retrieval"
    index_path: str = ""
    endpoint_url: str = ""
    default_decoding: DecodingConfig = dc_field(default_factory=DecodingConfig)
    cors_allowed_origins: list[str] = dc_field(default_factory=list)

    def __post_init__(self):
        if self.backend_kind not in ("retrieval", "remote"):
            raise ValueError(f"unknown backend kind {self.backend_kind!r}")
        host, _, port = self.bind_address.rpartition(":")
        if not host or not port.isdigit() or not 1 <= int(port) <= 65535:
            raise ValueError(f"bind_address must be host:port, got {self.bind_address!r}")

    @property
    def host(self) -> str:
        return self.bind_address.rpartition(":")[0]

    @property
    def port(self) -> int:
        return int(self.bind_address.rpartition(":")[2])


class FieldMap(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str | None = None
    about: str | None = None
    title: str | None = None
    labels: str | list[str] | None = None
    assignees: str | list[str] | None = None
    headlines_type: str | None = None
    headlines: str | list[str] | None = None
    summary: str | None = None


class ConfigBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    max_length: int = 512
    min_length: int = 0
    top_p: float = 0.95
    top_k: int = 50


class GenerateBody(FieldMap):
    config: ConfigBody | None = None


class ValidateBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    irt: str


def _scalar_field(value: str | None) -> FieldValue:
    if value is None or value.strip() in ("", MASK_TOKEN):
        return FieldValue.masked()
    if value.strip() == EMPTY_TOKEN:
        return FieldValue.empty()
    return FieldValue.concrete(value.strip())


def _list_field(value) -> FieldValue:
    if value is None:
        return FieldValue.masked()
    if isinstance(value, str):
        stripped = value.strip()
        if stripped in ("", MASK_TOKEN):
            return FieldValue.masked()
        if stripped == EMPTY_TOKEN:
            return FieldValue.empty()
        sep = "\n" if "\n" in stripped else ","
        value = [part.strip() for part in stripped.split(sep)]
    items = tuple(item.strip() for item in value if item and item.strip())
    return FieldValue.concrete(items) if items else FieldValue.empty()


def instruction_from_fields(fields: FieldMap) -> Instruction:
    """Blank or absent fields become <|MASK|>; explicit <|EMPTY|> is kept."""
    return Instruction(
        name=_scalar_field(fields.name),
        about=_scalar_field(fields.about),
        title=_scalar_field(fields.title),
        labels=_list_field(fields.labels),
        assignees=_list_field(fields.assignees),
        headlines_type=_scalar_field(fields.headlines_type),
        headlines=_list_field(fields.headlines),
        summary=fields.summary if fields.summary else None,
    )


def create_app(
    backend: GeneratorBackend,
    default_decoding: DecodingConfig | None = None,
    cors_allowed_origins: list[str] | None = None,
) -> FastAPI:
    app = FastAPI(title="girt-forge", docs_url=None, redoc_url=None)
    default_decoding = default_decoding or DecodingConfig()
    if cors_allowed_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=cors_allowed_origins,
            allow_methods=["GET", "POST"],
            allow_headers=["*"],
        )

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.exception_handler(BackendUnavailable)
    async def backend_down(request: Request, exc: BackendUnavailable):
        return JSONResponse(status_code=502, content={"detail": str(exc)})

    @app.exception_handler(InvalidBackendOutput)
    async def backend_garbage(request: Request, exc: InvalidBackendOutput):
        return JSONResponse(status_code=422, content={"detail": str(exc), "output": exc.output})

    @app.exception_handler(DataError)
    async def bad_data(request: Request, exc: DataError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/api/health")
    async def health():
        return {"status": "ok"}

    @app.post("/api/instruction")
    async def assemble(body: FieldMap):
        instruction = instruction_from_fields(body)
        return {"instruction": serialize_instruction(instruction)}

    @app.post("/api/generate")
    async def generate(body: GenerateBody):
        instruction = instruction_from_fields(body)
        try:
            config = (
                DecodingConfig(
                    max_length=body.config.max_length,
                    min_length=body.config.min_length,
                    top_p=body.config.top_p,
                    top_k=body.config.top_k,
                )
                if body.config
                else default_decoding
            )
        except ValueError as exc:
            raise DataError(str(exc))
        text = backend.generate(instruction, config)
        try:
            warnings = [v.code for v in validate_irt(parse_irt(text))]
        except IrtParseError as exc:
            raise InvalidBackendOutput(f"backend output is not a template: {exc}", text)
        return {
            "instruction": serialize_instruction(instruction),
            "irt": text,
            "warnings": warnings,
        }

    @app.post("/api/validate")
    async def validate(body: ValidateBody):
        try:
            violations = [v.code for v in validate_irt(parse_irt(body.irt))]
        except IrtParseError as exc:
            violations = ["MalformedTemplate: " + str(exc)]
        return {"violations": violations}

    return app
