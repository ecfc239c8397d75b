# tests/conftest.py

import sys
from pathlib import Path

import pytest

# プロジェクトルートのパスを取得
project_root = Path(__file__).resolve().parent.parent

# src パッケージを import できるようにプロジェクトルートを PYTHONPATH に追加
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: 計算に時間のかかるテスト (-m 'not slow' で除外)")


@pytest.fixture
def isolated_env(tmp_path, monkeypatch):
    """ログとキャッシュを一時ディレクトリに向ける"""
    monkeypatch.setenv("TROPMOD_CACHE", str(tmp_path / "cache"))
    monkeypatch.setenv("TROPMOD_LOG_DIR", str(tmp_path / "logs"))
    return tmp_path
