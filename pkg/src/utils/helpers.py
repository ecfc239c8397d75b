#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
汎用ユーティリティ関数を提供するモジュール

このモジュールは、ファイル出力や時間計測など、
プロジェクト全体で使用される汎用的な関数を提供します。
"""

import os
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional, Union

from src.utils.logging_config import get_logger

logger = get_logger(__name__)


def ensure_directory(directory: Union[str, Path]) -> Path:
    """
    ディレクトリが存在しない場合は作成する

    Args:
        directory: ディレクトリのパス

    Returns:
        Path: 作成済みのディレクトリ
    """
    path = Path(directory)
    if not path.exists():
        path.mkdir(parents=True, exist_ok=True)
        logger.debug(f"ディレクトリを作成しました: {path}")
    return path


def atomic_write_text(path: Union[str, Path], text: str) -> Path:
    """
    一時ファイルに書き込んでから置き換える (途中で中断されても壊れたファイルを残さない)

    Args:
        path: 出力先
        text: 書き込む文字列

    Returns:
        Path: 出力先
    """
    path = Path(path)
    tmp = path.with_name(f".{path.name}.{os.getpid()}.tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)
    return path


def write_output(text: str, output_path: Optional[Union[str, Path]] = None) -> None:
    """
    結果を標準出力またはファイルに書き出す

    Args:
        text: 出力する文字列
        output_path: ファイルパス (None の場合は標準出力)
    """
    if output_path is None:
        print(text)
        return
    path = Path(output_path)
    ensure_directory(path.parent)
    atomic_write_text(path, text if text.endswith("\n") else text + "\n")
    logger.info(f"結果をファイルに書き出しました: {path}")


@contextmanager
def timed(label: str) -> Iterator[None]:
    """
    処理時間をログに記録するコンテキストマネージャ

    Args:
        label: ログに出す処理名
    """
    start = time.perf_counter()
    try:
        yield
    finally:
        logger.info(f"{label}: {time.perf_counter() - start:.2f}秒")
