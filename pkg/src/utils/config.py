#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
設定ファイル関連のユーティリティ関数

優先順位: CLI 引数 > 環境変数 > settings.ini > 組み込みのデフォルト値
"""

import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Optional

from src.utils.environment import EnvironmentUtils as env
from src.utils.error_handler import UsageError
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

SECTION = "TROPMOD"
OUTPUT_FORMATS = ("json", "csv", "dot", "text")

_DEFAULTS = {
    "max_genus": 5,
    "cache_dir": "data/cache",
    "seed": 0,
    "collapse_budget": 200000,
    "collapse_restarts": 32,
    "threads": 0,
    "output_format": "text",
}


def get_setting(key: str) -> Any:
    """
    [TROPMOD] セクションの設定値を取得する

    Args:
        key (str): キー名

    Returns:
        Any: 設定値。読み取りに失敗した場合は組み込みのデフォルト値
    """
    default = _DEFAULTS.get(key)
    try:
        return env.get_config_value(SECTION, key, default=default)
    except Exception as e:
        logger.error(f"設定値 {key} の取得に失敗しました: {str(e)}")
        return default


def get_thread_count() -> int:
    """
    並列実行のスレッド数を取得する (0 は利用可能なコア数)

    Returns:
        int: スレッド数 (1 以上)
    """
    threads = int(get_setting("threads") or 0)
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads


@dataclass(frozen=True)
class RunConfig:
    """1 回の CLI 実行の設定"""

    command: str
    genus: int = 2
    n: int = 0
    seed: int = 0
    budget: int = 200000
    restarts: int = 32
    threads: int = 1
    cache_dir: Optional[Path] = None
    use_cache: bool = True
    output_format: str = "text"
    output_path: Optional[Path] = None
    max_genus: int = 5
    allow_large_genus: bool = False

    def validate(self) -> "RunConfig":
        """
        値の範囲を検証する

        Returns:
            RunConfig: 自分自身

        Raises:
            UsageError: 種数・印の数・出力形式が不正な場合
        """
        if self.genus < 1:
            raise UsageError(f"種数は 1 以上である必要があります: {self.genus}", {"種数": self.genus})
        if self.n < 0:
            raise UsageError(f"印の数は 0 以上である必要があります: {self.n}", {"印の数": self.n})
        if self.genus > self.max_genus and not self.allow_large_genus:
            raise UsageError(
                f"種数 {self.genus} は上限 {self.max_genus} を超えています (--allow-large-genus で解除)",
                {"種数": self.genus},
            )
        if self.output_format not in OUTPUT_FORMATS:
            raise UsageError(f"未知の出力形式です: {self.output_format}")
        return self

    def with_command(self, command: str, **changes: Any) -> "RunConfig":
        return replace(self, command=command, **changes)


def build_run_config(args: Any) -> RunConfig:
    """
    argparse の結果・環境変数・settings.ini から RunConfig を組み立てる

    Args:
        args: argparse.Namespace (属性が無いものは設定ファイルの値で補う)

    Returns:
        RunConfig: 検証済みの設定
    """
    def pick(name: str, setting: str) -> Any:
        value = getattr(args, name, None)
        return get_setting(setting) if value is None else value

    cache_dir = getattr(args, "cache_dir", None)
    cache_path = Path(cache_dir) if cache_dir else env.get_cache_dir()

    threads = getattr(args, "threads", None)
    output = getattr(args, "output", None)

    genus = getattr(args, "genus", None)
    n = getattr(args, "n", None)

    config = RunConfig(
        command=getattr(args, "command", None) or "reproduce",
        genus=2 if genus is None else int(genus),
        n=0 if n is None else int(n),
        seed=int(pick("seed", "seed")),
        budget=int(pick("budget", "collapse_budget")),
        restarts=int(pick("restarts", "collapse_restarts")),
        threads=int(threads) if threads else get_thread_count(),
        cache_dir=cache_path,
        use_cache=not getattr(args, "no_cache", False),
        output_format=str(pick("format", "output_format")),
        output_path=Path(output) if output else None,
        max_genus=int(pick("max_genus", "max_genus")),
        allow_large_genus=bool(getattr(args, "allow_large_genus", False)),
    )
    logger.debug(f"実行設定: {config}")
    return config.validate()
