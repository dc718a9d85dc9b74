# backend/api/main.py
import logging
from typing import Any, Dict, Optional

from dotenv import load_dotenv
from fastapi import FastAPI, File, Form, HTTPException, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

load_dotenv()  # HODGE_* opcionais no .env

from ..config import load_settings
from ..errors import InputError, UnsupportedRegimeError, VerificationError
from ..services.commands import RunOptions, available_commands, run
from ..services.fixtures import list_fixtures, load_fixture

logger = logging.getLogger(__name__)


# --------------- FASTAPI SETUP -----------------
app = FastAPI(title="Hodge Mixed Structures API")

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],  # Em produção, restringir
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

settings = load_settings()


# --------------- EVENTO DE STARTUP -----------------
@app.on_event("startup")
def on_startup():
    logger.info("API iniciada; %d comandos disponíveis", len(available_commands()))


# --------------- HEALTH CHECK -----------------
@app.get("/health")
def health():
    return {"status": "ok"}


# --------------- FIXTURES -----------------
@app.get("/fixtures")
def fixtures():
    return list_fixtures()


@app.get("/fixtures/{name}")
def fixture(name: str):
    try:
        return load_fixture(name)
    except InputError as exc:
        raise HTTPException(status_code=404, detail=exc.message)


# --------------- CÁLCULO -----------------
_HTTP_STATUS = {
    cls.exit_code: cls.http_status for cls in (InputError, UnsupportedRegimeError, VerificationError)
}


def _respond(group: str, action: str, problem: Any, twisted: Optional[bool]) -> JSONResponse:
    doc, code = run(group, action, problem, RunOptions(twisted=twisted, config=settings))
    # veredito negativo (exit 1) continua 200
    return JSONResponse(content=doc, status_code=_HTTP_STATUS.get(code, 200))


@app.post("/compute/upload")
async def compute_upload(
    group: str = Form(...),
    action: str = Form(...),
    twisted: Optional[bool] = Form(None),
    file: UploadFile = File(...),
):
    content = await file.read()
    try:
        text = content.decode("utf-8")
    except UnicodeDecodeError:
        raise HTTPException(status_code=400, detail="arquivo-problema deve ser UTF-8")
    return _respond(group, action, text, twisted)


@app.post("/compute/{group}/{action}")
def compute(group: str, action: str, problem: Dict[str, Any], twisted: Optional[bool] = None):
    return _respond(group, action, problem, twisted)
