#!/usr/bin/env python3
# -*- coding: utf-8 -*-

from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Tuple

import orjson
from pydantic import ValidationError

from errors import SettingsError
from model import FitOptions

DATA_DIR = Path(__file__).parent / "data"
FIT_SETTINGS_FILE = DATA_DIR / "fit_settings.json"
KARATE_FILE = DATA_DIR / "karate.txt"
MANIFEST_FILE = DATA_DIR / "manifest.txt"

DEFAULT_FIT_SETTINGS: Dict[str, object] = FitOptions().model_dump(mode="json")


def _write_json(path: Path, obj: object) -> None:
    path.write_bytes(orjson.dumps(obj, option=orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY))


def _read_json(path: Path) -> object:
    try:
        return orjson.loads(path.read_bytes())
    except Exception as exc:
        raise SettingsError(f"failed to parse json: {path}") from exc


def ensure_data_files(settings_path: Path = FIT_SETTINGS_FILE) -> None:
    settings_path.parent.mkdir(parents=True, exist_ok=True)
    if not settings_path.exists():
        _write_json(settings_path, DEFAULT_FIT_SETTINGS)


def load_fit_settings(path: Path = FIT_SETTINGS_FILE) -> FitOptions:
    ensure_data_files(path)
    raw = _read_json(path)
    if not isinstance(raw, dict):
        raise SettingsError(f"{path.name} must be an object")
    for k in DEFAULT_FIT_SETTINGS:
        if k not in raw:
            raise SettingsError(f"{path.name} missing key: {k}")
    try:
        return FitOptions.model_validate(raw)
    except ValidationError as exc:
        raise SettingsError(f"invalid settings in {path.name}: {exc.errors()[0]['msg']}") from exc


def save_fit_settings(options: FitOptions, path: Path = FIT_SETTINGS_FILE) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    _write_json(path, options.model_dump(mode="json"))


def load_manifest(path: Path = MANIFEST_FILE) -> List[Tuple[str, Path]]:
    """`name = relative/path` lines; '#' comments and blank lines are skipped."""
    path = Path(path)
    entries: List[Tuple[str, Path]] = []
    for line_number, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, rel = line.partition("=")
        if not sep or not name.strip() or not rel.strip():
            raise SettingsError(f"{path.name}:{line_number}: expected 'name = path', got {raw!r}")
        target = Path(rel.strip())
        if not target.is_absolute():
            target = path.parent / target
        entries.append((name.strip(), target))
    return entries


def write_alpha_file(path: Path, payload: Dict[str, object]) -> None:
    _write_json(Path(path), payload)


def read_alpha_file(path: Path) -> Dict[str, object]:
    raw = _read_json(Path(path))
    if not isinstance(raw, dict) or "alpha" not in raw:
        raise SettingsError(f"{Path(path).name} must be an object with an 'alpha' list")
    return raw
