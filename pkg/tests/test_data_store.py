from __future__ import annotations

from pathlib import Path

import orjson
import pytest


def test_missing_settings_file_is_created_with_defaults(tmp_path: Path):
    from data_store import DEFAULT_FIT_SETTINGS, load_fit_settings

    path = tmp_path / "nested" / "fit_settings.json"
    opts = load_fit_settings(path)
    assert path.exists()
    assert orjson.loads(path.read_bytes()) == DEFAULT_FIT_SETTINGS
    assert opts.tolerance == 1e-10
    assert opts.max_iterations == 100


def test_settings_round_trip(tmp_path: Path):
    from data_store import load_fit_settings, save_fit_settings
    from model import FitOptions, SolverChoice

    path = tmp_path / "fit_settings.json"
    opts = FitOptions(tolerance=1e-8, solver=SolverChoice.PRECOND, max_halvings=0)
    save_fit_settings(opts, path)
    assert load_fit_settings(path) == opts


def test_settings_missing_key_is_rejected(tmp_path: Path):
    from data_store import DEFAULT_FIT_SETTINGS, load_fit_settings
    from errors import SettingsError

    raw = dict(DEFAULT_FIT_SETTINGS)
    raw.pop("dense_cap")
    path = tmp_path / "fit_settings.json"
    path.write_bytes(orjson.dumps(raw))
    with pytest.raises(SettingsError, match="missing key: dense_cap"):
        load_fit_settings(path)


def test_settings_invalid_value_is_rejected(tmp_path: Path):
    from data_store import DEFAULT_FIT_SETTINGS, load_fit_settings
    from errors import SettingsError

    path = tmp_path / "fit_settings.json"
    path.write_bytes(orjson.dumps({**DEFAULT_FIT_SETTINGS, "contraction": 1.5}))
    with pytest.raises(SettingsError, match="invalid settings"):
        load_fit_settings(path)
    path.write_bytes(orjson.dumps({**DEFAULT_FIT_SETTINGS, "unknown": 1}))
    with pytest.raises(SettingsError):
        load_fit_settings(path)


def test_settings_broken_json_is_rejected(tmp_path: Path):
    from data_store import load_fit_settings
    from errors import SettingsError

    path = tmp_path / "fit_settings.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(SettingsError, match="failed to parse json"):
        load_fit_settings(path)


def test_bundled_settings_match_defaults():
    from data_store import FIT_SETTINGS_FILE, load_fit_settings
    from model import FitOptions

    assert load_fit_settings(FIT_SETTINGS_FILE) == FitOptions()


def test_manifest_resolves_relative_paths(tmp_path: Path):
    from data_store import load_manifest

    manifest = tmp_path / "manifest.txt"
    manifest.write_text("# comment\n\nkarate = karate.txt\nfar = /abs/far.txt\n", encoding="utf-8")
    assert load_manifest(manifest) == [("karate", tmp_path / "karate.txt"), ("far", Path("/abs/far.txt"))]


def test_bundled_manifest_lists_karate_only():
    from data_store import KARATE_FILE, MANIFEST_FILE, load_manifest

    assert load_manifest(MANIFEST_FILE) == [("karate", KARATE_FILE)]


def test_alpha_file_requires_alpha_key(tmp_path: Path):
    from data_store import read_alpha_file, write_alpha_file
    from errors import SettingsError

    path = tmp_path / "g.alpha.json"
    write_alpha_file(path, {"link": "log", "alpha": [-1.0, -2.0]})
    assert read_alpha_file(path)["alpha"] == [-1.0, -2.0]
    write_alpha_file(path, {"link": "log"})
    with pytest.raises(SettingsError):
        read_alpha_file(path)
