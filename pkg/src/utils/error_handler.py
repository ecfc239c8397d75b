#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
共通エラーハンドリングユーティリティ

計算モジュール全体で使用する例外階層と、例外の捕捉・ログ記録・終了コード変換を
統一的に管理するためのユーティリティクラスを提供します。

終了コード:
    0: 正常終了
    1: 利用者側のエラー (引数・入力グラフの不正)
    2: 内部整合性エラー (∂²≠0、Burnside 平均が整数にならない等)
"""

import traceback
import inspect
from typing import Dict, Any, Optional, Callable, TypeVar, cast

from src.utils.logging_config import get_logger

logger = get_logger(__name__)

# 戻り値の型を定義
T = TypeVar('T')

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONSISTENCY = 2


class TropModError(Exception):
    """本パッケージが送出する全ての例外の基底クラス"""

    exit_code = EXIT_USAGE

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.context = dict(context or {})


class UsageError(TropModError):
    """設定値や引数が不正な場合の例外"""

    exit_code = EXIT_USAGE


class GraphStructureError(UsageError):
    """グラフ・分割・森の条件を満たさない入力に対する例外"""


class ConsistencyError(TropModError):
    """計算結果の内部整合性チェックに失敗した場合の例外"""

    exit_code = EXIT_CONSISTENCY


class BoundaryConsistencyError(ConsistencyError):
    """境界写像の合成が 0 にならない場合の例外 (問題のセル対を保持)"""

    def __init__(self, message: str, cell: Any = None, face: Any = None,
                 context: Optional[Dict[str, Any]] = None):
        ctx = dict(context or {})
        ctx.setdefault("セル", cell)
        ctx.setdefault("余次元2の面", face)
        super().__init__(message, ctx)
        self.cell = cell
        self.face = face


class BurnsideIntegralityError(ConsistencyError):
    """群平均による軌道数が整数にならない場合の例外"""


class CellCountMismatchError(ConsistencyError):
    """セル数の独立な二通りの計算が一致しない場合の例外"""


class ErrorHandler:
    """
    統一的なエラー処理を提供するクラス
    """

    def __init__(self, module_name: str = None):
        """
        ErrorHandlerの初期化

        Args:
            module_name (str, optional): エラーが発生したモジュール名。指定しない場合は自動検出
        """
        self.module_name = module_name or self._detect_module_name()
        self.logger = get_logger(self.module_name)

    def _detect_module_name(self) -> str:
        """
        呼び出し元のモジュール名を自動的に検出

        Returns:
            str: 検出されたモジュール名
        """
        frame = inspect.currentframe()
        if frame:
            try:
                caller_frame = frame.f_back
                if caller_frame and caller_frame.f_back:
                    module = inspect.getmodule(caller_frame.f_back)
                    if module:
                        return module.__name__
            finally:
                # 循環参照を防ぐためにフレームを明示的に解放
                del frame

        return "unknown_module"

    @staticmethod
    def exit_code_for(exception: BaseException) -> int:
        """
        例外を CLI の終了コードに変換する

        Args:
            exception: 例外オブジェクト

        Returns:
            int: 1 (利用者側のエラー) または 2 (内部整合性エラー)
        """
        if isinstance(exception, TropModError):
            return exception.exit_code
        if isinstance(exception, (ValueError, FileNotFoundError)):
            return EXIT_USAGE
        return EXIT_CONSISTENCY

    def handle_exception(self, error_message: str, exception: Exception = None, context: dict = None) -> None:
        """
        例外をハンドリングしてログに記録する

        Args:
            error_message: エラーメッセージ
            exception: 例外オブジェクト
            context: エラーの追加コンテキスト情報
        """
        ctx = dict(context or {})

        if exception:
            tb_str = "".join(traceback.format_exception(type(exception), exception, exception.__traceback__))
            self.logger.error(f"{error_message}: {str(exception)}")
            self.logger.debug(tb_str)

            ctx["例外内容"] = str(exception)
            ctx["例外タイプ"] = exception.__class__.__name__
            if isinstance(exception, TropModError):
                for key, value in exception.context.items():
                    ctx.setdefault(key, value)
        else:
            self.logger.error(error_message)

        self.logger.error(self.format_error_context(ctx))

    def with_error_handling(
        self,
        func: Callable[..., T],
        error_message: str,
        context: Dict[str, Any] = None,
        default_return: Any = None
    ) -> T:
        """
        関数をエラーハンドリングのコンテキストで実行

        Args:
            func (Callable): 実行する関数
            error_message (str): エラー時のメッセージ
            context (Dict[str, Any], optional): エラー発生時のコンテキスト
            default_return (Any, optional): エラー時の戻り値

        Returns:
            T: 関数の実行結果、エラー時はdefault_return
        """
        try:
            return func()
        except Exception as e:
            self.handle_exception(
                error_message=error_message,
                exception=e,
                context=context,
            )
            return cast(T, default_return)

    def format_error_context(self, context: dict) -> str:
        """
        エラーコンテキスト情報を整形された文字列に変換する

        Args:
            context (dict): エラーコンテキスト情報の辞書

        Returns:
            str: 整形されたコンテキスト情報
        """
        if not context:
            return "コンテキスト情報なし"

        formatted_text = "【エラーコンテキスト】\n"

        # 重要な情報を先に表示
        priority_keys = ["操作", "種数", "印の数", "セル", "余次元2の面"]
        ordered = [k for k in priority_keys if k in context] + [k for k in context if k not in priority_keys]
        for key in ordered:
            value = context[key]
            if isinstance(value, str) and "\n" in value:
                value = "\n    ".join(value.split("\n"))
            formatted_text += f"・{key}: {value}\n"

        return formatted_text
