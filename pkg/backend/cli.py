# backend/cli.py
"""
Linha de comando: python -m backend.cli GRUPO AÇÃO ARQUIVO [opções]

Exemplos:
    python -m backend.cli mhs delta fixtures/fix1.json
    python -m backend.cli ih torsion fixture:fix4 --pretty
    python -m backend.cli orbit probe fixture:fix3_twist --csv probe.csv
    python -m backend.cli --suite ih les fixtures/*.json
    python -m backend.cli fixtures list

stdout recebe só o documento; logs vão para stderr.
"""
import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .config import Settings, load_settings
from .errors import InputError
from .services.codec import dumps
from .services.commands import RunOptions, available_commands, run
from .services.fixtures import list_fixtures, load_fixture
from .services.reports import render_pretty, suite_frame

logger = logging.getLogger("backend.cli")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m backend.cli",
        description="Estruturas de Hodge mistas exatas sobre ℚ(i).",
        epilog="comandos: " + ", ".join(available_commands()) + "; fixtures list|show",
    )
    parser.add_argument("group", help="mhs | filt | sl2 | ih | orbit | zloc | fixtures")
    parser.add_argument("action", help="ação dentro do grupo")
    parser.add_argument("inputs", nargs="*", help="arquivo(s)-problema, '-' para stdin ou fixture:NOME")
    parser.add_argument("--pretty", action="store_true", help="tabelas alinhadas em vez de JSON compacto")
    parser.add_argument("--out", help="grava o documento neste caminho em vez de stdout")
    parser.add_argument("--suite", action="store_true", help="vários arquivos, em paralelo, ordem determinística")
    parser.add_argument("--csv", dest="csv_path", help="orbit probe: grava a tabela de desvios em CSV")
    parser.add_argument("--verbose", "-v", action="store_true", help="logs de depuração em stderr")
    twist = parser.add_mutually_exclusive_group()
    twist.add_argument("--twisted", dest="twisted", action="store_const", const=True, default=None)
    twist.add_argument("--untwisted", dest="twisted", action="store_const", const=False)
    return parser


def _read_input(source: str) -> Any:
    if source == "-":
        return sys.stdin.read()
    if source.startswith("fixture:"):
        return load_fixture(source.split(":", 1)[1])
    path = Path(source)
    if not path.exists():
        raise InputError(f"arquivo não encontrado: {source}")
    return path.read_text(encoding="utf-8")


def _run_one(group: str, action: str, source: str, options: RunOptions) -> Tuple[Dict[str, Any], int]:
    try:
        problem = _read_input(source)
    except InputError as exc:
        return {"command": f"{group} {action}", "status": "error", "error": exc.to_dict(), "exit_code": exc.exit_code}, exc.exit_code
    return run(group, action, problem, options)


def _fixtures_command(action: str, inputs: Sequence[str]) -> Tuple[Dict[str, Any], int]:
    if action == "list":
        return {"command": "fixtures list", "status": "ok", "result": list_fixtures(), "exit_code": 0}, 0
    if action == "show" and len(inputs) == 1:
        try:
            doc = load_fixture(inputs[0])
        except InputError as exc:
            return {"command": "fixtures show", "status": "error", "error": exc.to_dict(), "exit_code": 2}, 2
        return {"command": "fixtures show", "status": "ok", "result": doc, "exit_code": 0}, 0
    exc = InputError("uso: fixtures list | fixtures show NOME")
    return {"command": f"fixtures {action}", "status": "error", "error": exc.to_dict(), "exit_code": 2}, 2


def _suite_csv_path(csv_path: str, index: int, source: str) -> str:
    """tabela.csv -> tabela-0-fix3.csv: um arquivo por entrada da suíte."""
    base = Path(csv_path)
    name = Path(source.split(":", 1)[-1]).stem if source != "-" else "stdin"
    return str(base.with_name(f"{base.stem}-{index}-{name}{base.suffix or '.csv'}"))


def _run_suite(group: str, action: str, inputs: List[str], options: RunOptions, settings: Settings) -> Tuple[Dict[str, Any], int]:
    per_input = [
        replace(options, csv_path=_suite_csv_path(options.csv_path, i, src)) if options.csv_path else options
        for i, src in enumerate(inputs)
    ]
    with ThreadPoolExecutor(max_workers=settings.suite_workers) as pool:
        outcomes = list(pool.map(lambda job: _run_one(group, action, *job), zip(inputs, per_input)))
    results = []
    for source, (doc, _) in zip(inputs, outcomes):
        results.append({"file": source, **doc})
    code = max((c for _, c in outcomes), default=0)
    return {"command": f"{group} {action}", "status": "suite", "suite": results, "exit_code": code}, code


def _emit(doc: Dict[str, Any], pretty: bool, out: Optional[str]) -> None:
    if pretty and "suite" in doc:
        text = suite_frame(doc["suite"]).to_string(index=False) + "\n"
    elif pretty:
        text = render_pretty(doc)
    else:
        text = dumps(doc) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
        logger.info("documento gravado em %s", out)
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = load_settings()
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else getattr(logging, settings.log_level, logging.WARNING),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    options = RunOptions(twisted=args.twisted, csv_path=args.csv_path, config=settings)

    if args.group == "fixtures":
        doc, code = _fixtures_command(args.action, args.inputs)
    elif args.suite:
        doc, code = _run_suite(args.group, args.action, list(args.inputs), options, settings)
    elif len(args.inputs) != 1:
        exc = InputError("informe exatamente um arquivo-problema (ou use --suite)")
        doc = {"command": f"{args.group} {args.action}", "status": "error", "error": exc.to_dict(), "exit_code": 2}
        code = 2
    else:
        doc, code = _run_one(args.group, args.action, args.inputs[0], options)

    _emit(doc, args.pretty, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
