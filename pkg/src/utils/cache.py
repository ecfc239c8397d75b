#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
計算結果のファイルキャッシュ

1 エントリ = 1 JSON ファイル。ペイロードの sha256 を一緒に保存し、
読み込み時にツールのバージョンとハッシュを照合します。
"""

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Optional

from src.utils.helpers import atomic_write_text, ensure_directory
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

TOOL_VERSION = "1.0.0"


def _digest(payload: Any) -> str:
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class CacheEntry:
    """キャッシュの 1 エントリ (キー = 操作名 + パラメータ + 16進キー)"""

    op: str
    params: str
    hexkey: str
    payload: Any = None
    tool_version: str = TOOL_VERSION

    @property
    def file_name(self) -> str:
        return f"{self.op}-{self.params}-{self.hexkey}.json"

    def to_json(self) -> str:
        return json.dumps(
            {
                "key": {"op": self.op, "params": self.params, "hexkey": self.hexkey},
                "toolVersion": self.tool_version,
                "sha256": _digest(self.payload),
                "payload": self.payload,
            },
            sort_keys=True,
        )


class ResultCache:
    """
    キャッシュディレクトリ配下の JSON ファイルを読み書きするクラス
    """

    def __init__(self, cache_dir: Optional[Path], tool_version: str = TOOL_VERSION, enabled: bool = True):
        """
        Args:
            cache_dir (Optional[Path]): キャッシュディレクトリ。None の場合は無効
            tool_version (str): このバージョンと一致するエントリのみヒットする
            enabled (bool): False の場合は常にミス扱いで書き込みもしない
        """
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self.tool_version = tool_version
        self.enabled = enabled and self.cache_dir is not None
        self.hits = 0
        self.misses = 0

    def _path(self, entry: CacheEntry) -> Path:
        return self.cache_dir / entry.file_name

    def get(self, op: str, params: str, hexkey: str = "-") -> Optional[Any]:
        """
        キャッシュを参照する

        Returns:
            Optional[Any]: ヒットした場合はペイロード、それ以外は None
        """
        if not self.enabled:
            return None
        entry = CacheEntry(op, params, hexkey, tool_version=self.tool_version)
        path = self._path(entry)
        if not path.exists():
            self.misses += 1
            return None

        try:
            stored = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            logger.warning(f"キャッシュファイルを読み込めません。再計算します: {path} ({e})")
            path.unlink(missing_ok=True)
            self.misses += 1
            return None

        if stored.get("toolVersion") != self.tool_version:
            logger.debug(f"バージョン不一致のためキャッシュを使用しません: {path.name}")
            self.misses += 1
            return None

        payload = stored.get("payload")
        if stored.get("sha256") != _digest(payload):
            logger.warning(f"キャッシュのハッシュが一致しません。破損とみなして削除します: {path}")
            path.unlink(missing_ok=True)
            self.misses += 1
            return None

        self.hits += 1
        return payload

    def put(self, op: str, params: str, payload: Any, hexkey: str = "-") -> None:
        if not self.enabled:
            return
        entry = CacheEntry(op, params, hexkey, payload, self.tool_version)
        ensure_directory(self.cache_dir)
        atomic_write_text(self._path(entry), entry.to_json())
        logger.debug(f"キャッシュに保存しました: {entry.file_name}")

    def get_or_compute(self, op: str, params: str, compute: Callable[[], Any],
                       encode: Callable[[Any], Any] = lambda x: x,
                       decode: Callable[[Any], Any] = lambda x: x,
                       hexkey: str = "-") -> Any:
        """
        キャッシュにあれば復元し、なければ計算して保存する

        Args:
            op (str): 操作名
            params (str): パラメータ文字列
            compute (Callable): 計算関数
            encode (Callable): 計算結果 → JSON 化可能な値
            decode (Callable): JSON 値 → 計算結果
            hexkey (str): 正準形の16進表現など

        Returns:
            Any: 計算結果
        """
        cached = self.get(op, params, hexkey)
        if cached is not None:
            return decode(cached)
        value = compute()
        self.put(op, params, encode(value), hexkey)
        return value
