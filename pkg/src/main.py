#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
熱帯曲線のモジュライ空間の組合せモデルを計算するメインスクリプト

サブコマンド:
    enumerate  安定グラフ (またはフィルトレーション) の列挙
    delta      Δ_g の構築と検証、崩壊探索
    fiber      1 つの単体上のファイバー C(σ) の母関数と軌道
    space      X_{g,n} のセル数・オイラー標数・ホモロジー・漸近係数
    reproduce  既知の値の再現チェック一式

終了コード: 0 正常、1 引数・入力の誤り、2 内部整合性エラー
"""

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

# プロジェクトのルートディレクトリをPYTHONPATHに追加
root_dir = Path(__file__).parent.parent
sys.path.append(str(root_dir))

from src.modules.acceptance_report import AcceptanceReport
from src.modules.tropical.cw_complex import (
    asymptotic_coefficient,
    build_cw,
    euler_sweep,
    homology_z2,
    total_poly,
)
from src.modules.tropical.delta_complex import (
    check_facet_identities,
    collapse_search,
    dimension_and_purity,
    euler_characteristic,
    f_vector,
    is_connected,
    report_dimension,
    to_dot,
)
from src.modules.tropical.isomorphism import automorphisms
from src.modules.tropical.session import TropicalSession
from src.utils.cache import ResultCache
from src.utils.config import RunConfig, build_run_config
from src.utils.environment import EnvironmentUtils as env
from src.utils.error_handler import EXIT_CONSISTENCY, EXIT_OK, ErrorHandler
from src.utils.helpers import timed, write_output
from src.utils.logging_config import LoggingConfig, get_logger

logger = get_logger(__name__)


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """
    コマンドライン引数を解析する

    Returns:
        argparse.Namespace: 解析された引数
    """
    parser = argparse.ArgumentParser(description='熱帯曲線のモジュライ空間の組合せモデルの計算')
    parser.add_argument('--env', default=None, help='実行環境 (development または production)')
    parser.add_argument('--log-level', default=None, choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'],
                        help='ログレベル (DEBUG, INFO, WARNING, ERROR, CRITICAL)')
    parser.add_argument('--cache-dir', default=None, help='キャッシュディレクトリ (環境変数 TROPMOD_CACHE より優先)')
    parser.add_argument('--no-cache', action='store_true', help='キャッシュを使わない')
    parser.add_argument('--threads', type=int, default=None, help='並列数 (既定: 利用可能なコア数)')
    parser.add_argument('--seed', type=int, default=None, help='乱数シード')
    parser.add_argument('--max-genus', type=int, default=None, help='種数の上限')
    parser.add_argument('--allow-large-genus', action='store_true', help='種数の上限を解除する')
    parser.add_argument('--format', default=None, choices=['json', 'csv', 'dot', 'text'], help='出力形式')
    parser.add_argument('--output', default=None, help='出力ファイル (既定: 標準出力)')

    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('enumerate', help='安定グラフの列挙')
    p.add_argument('--genus', type=int, required=True)
    p.add_argument('--filtered', action='store_true', help='森によるフィルトレーションも列挙する')

    p = sub.add_parser('delta', help='Δ_g の構築と検証')
    p.add_argument('--genus', type=int, required=True)
    p.add_argument('--check', default='purity,connectivity,euler',
                   help='実行する検証 (purity, connectivity, euler, facets のカンマ区切り)')
    p.add_argument('--collapse', action='store_true', help='崩壊列を探す')
    p.add_argument('--budget', type=int, default=None, help='崩壊探索の手数の上限')
    p.add_argument('--restarts', type=int, default=None, help='崩壊探索の試行回数')

    p = sub.add_parser('fiber', help='ファイバー C(σ) の計算')
    p.add_argument('--genus', type=int, required=True)
    p.add_argument('--class', dest='cls', required=True, help='正準形の16進表現 (接頭辞可) またはセル番号')
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--orbits', action='store_true', help='キューブ軌道の一覧も出力する')

    p = sub.add_parser('space', help='X_{g,n} の計算')
    p.add_argument('--genus', type=int, required=True)
    p.add_argument('--n', type=int, default=0)
    p.add_argument('--poly', action='store_true', help='セル数の母関数')
    p.add_argument('--euler', action='store_true', help='オイラー標数')
    p.add_argument('--homology', action='store_true', help='Z_2 係数のベッチ数')
    p.add_argument('--asymptotic', action='store_true', help='漸近係数')
    p.add_argument('--sweep', type=int, default=None, help='n = 0..N のセル数とオイラー標数の表 (CSV)')

    p = sub.add_parser('reproduce', help='既知の値の再現チェック')
    p.add_argument('--json', action='store_true', help='JSON で出力する')
    p.add_argument('--exploratory', action='store_true', help='探索的な計算 (Δ_4 など) も実行する')

    return parser.parse_args(argv)


def setup_environment(args: argparse.Namespace) -> RunConfig:
    """
    実行環境のセットアップを行う
    - 環境変数ファイルの読み込み
    - ログレベルの設定
    - 実行設定の組み立て
    """
    if env.load_env():
        logger.debug("環境変数を読み込みました")
    if args.env:
        os.environ['APP_ENV'] = args.env
    level = (args.log_level or env.get_env_var("LOG_LEVEL", "")
             or env.get_config_value(env.get_environment(), "LOG_LEVEL", default=None))
    if level:
        LoggingConfig.set_level(str(level))
    return build_run_config(args)


def render(data: Any, config: RunConfig) -> str:
    """結果を出力形式に合わせて文字列にする"""
    fmt = config.output_format
    if isinstance(data, pd.DataFrame):
        if fmt == 'json':
            return data.to_json(orient='records', force_ascii=False)
        if fmt == 'csv':
            return data.to_csv(index=False).rstrip("\n")
        return data.to_string(index=False)
    if fmt == 'json' or not isinstance(data, str):
        return json.dumps(data, ensure_ascii=False, indent=2, default=str)
    return data


def _session(config: RunConfig) -> TropicalSession:
    cache = ResultCache(config.cache_dir, enabled=config.use_cache)
    return TropicalSession(cache, workers=config.threads)


def enumerate_workflow(args: argparse.Namespace, config: RunConfig, session: TropicalSession) -> int:
    """
    安定グラフ (またはフィルトレーション) を列挙する

    Returns:
        int: 終了コード
    """
    g = config.genus
    if args.filtered:
        items = [(c.representative, c.form, c.depth) for c in session.delta(g).cells]
    else:
        items = [(c.representative, c.form, 1) for c in session.stable_graphs(g)]

    if config.output_format == 'dot':
        graphs = [fg.graph if hasattr(fg, 'graph') else fg for fg, _, _ in items]
        write_output("\n".join(graph.to_dot(f"G{i}") for i, graph in enumerate(graphs)), config.output_path)
        return EXIT_OK

    rows = []
    for fg, form, depth in items:
        graph = fg.graph if hasattr(fg, 'graph') else fg
        rows.append({
            'canonical': form.hex,
            'vertices': len(graph.vertices),
            'edges': len(graph.edges),
            'autOrder': automorphisms(fg).order,
            'depth': depth,
        })
    logger.info(f"種数 {g}: {len(rows)} 件を列挙しました")
    data = rows if config.output_format == 'json' else pd.DataFrame(rows)
    write_output(render(data, config), config.output_path)
    return EXIT_OK


def delta_workflow(args: argparse.Namespace, config: RunConfig, session: TropicalSession) -> int:
    """Δ_g を構築して検証する"""
    d = session.delta(config.genus)
    if config.output_format == 'dot':
        write_output(to_dot(d), config.output_path)
        return EXIT_OK

    checks = {c.strip() for c in args.check.split(',') if c.strip()}
    result: Dict[str, Any] = {'genus': config.genus, 'fVector': f_vector(d)}
    if 'purity' in checks:
        dim, pure = dimension_and_purity(d)
        result.update({'dimension': dim, 'pure': pure, 'dimensionCheck': report_dimension(d)})
    if 'connectivity' in checks:
        result['connected'] = is_connected(d)
    if 'euler' in checks:
        result['euler'] = euler_characteristic(d)
    if 'facets' in checks:
        result['facetIdentityFailures'] = check_facet_identities(d)
    if args.collapse:
        budget = args.budget if args.budget is not None else config.budget
        restarts = args.restarts if args.restarts is not None else config.restarts
        certificate = collapse_search(d, config.seed, budget, restarts)
        result['collapse'] = {
            'verdict': certificate.verdict,
            'seed': certificate.seed,
            'steps': [[d.cells[a].form.hex, d.cells[b].form.hex] for a, b in certificate.steps],
        }
    write_output(render(result, config), config.output_path)
    return EXIT_OK


def fiber_workflow(args: argparse.Namespace, config: RunConfig, session: TropicalSession) -> int:
    """1 つの単体上のファイバーを計算する"""
    index, cls = session.find_class(config.genus, args.cls)
    fiber = session.fibers(config.genus)[index]
    poly = session.fiber_poly(cls, fiber, config.n)
    result: Dict[str, Any] = {
        'canonical': cls.form.hex,
        'depth': cls.depth,
        'autOrder': fiber.order,
        'n': config.n,
        'poly': poly.as_list(),
    }
    if args.orbits:
        result['orbits'] = [{'cube': fiber.name(o), 'dim': o.dim} for o in fiber.orbits(config.n)]
    write_output(render(result, config), config.output_path)
    return EXIT_OK


def space_workflow(args: argparse.Namespace, config: RunConfig, session: TropicalSession) -> int:
    """X_{g,n} を計算する"""
    g, n = config.genus, config.n
    d, fibers = session.delta(g), session.fibers(g)

    if args.sweep is not None:
        table = euler_sweep(g, args.sweep, d)
        write_output(render(table, config.with_command(config.command, output_format='csv')
                            if config.output_format == 'text' else config), config.output_path)
        return EXIT_OK

    wanted = {k for k in ('poly', 'euler', 'homology', 'asymptotic') if getattr(args, k)}
    wanted = wanted or {'poly', 'euler', 'homology'}
    poly = total_poly(g, n, d, fibers)
    result: Dict[str, Any] = {'genus': g, 'n': n, 'cells': poly.as_list()}
    if 'poly' in wanted:
        result['poly'] = poly.as_list()
    if 'euler' in wanted:
        result['euler'] = poly.euler
    if 'homology' in wanted:
        with timed(f"X_{{{g},{n}}} のホモロジー計算"):
            result['betti'] = homology_z2(build_cw(g, n, d, fibers))
    if 'asymptotic' in wanted:
        asym = asymptotic_coefficient(g, delta=d, fibers=fibers)
        result['asymptotic'] = {'value': str(asym.value), 'base': asym.base, 'anomalies': asym.anomalies}

    if wanted == {'euler'} and config.output_format == 'text':
        write_output(str(result['euler']), config.output_path)
    else:
        write_output(render(result, config), config.output_path)
    return EXIT_OK


def reproduce_workflow(args: argparse.Namespace, config: RunConfig, session: TropicalSession) -> int:
    """既知の値の再現チェックを実行する"""
    if args.json:
        config = config.with_command(config.command, output_format='json')
    report = AcceptanceReport(session, config.seed, config.budget, config.restarts)
    table = report.run(exploratory=args.exploratory)
    write_output(render(table, config), config.output_path)
    return EXIT_OK if AcceptanceReport.all_passed(table) else EXIT_CONSISTENCY


WORKFLOWS = {
    'enumerate': enumerate_workflow,
    'delta': delta_workflow,
    'fiber': fiber_workflow,
    'space': space_workflow,
    'reproduce': reproduce_workflow,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    メイン処理

    Returns:
        int: 終了コード (0 正常、1 引数・入力の誤り、2 内部整合性エラー)
    """
    args = parse_arguments(argv)
    handler = ErrorHandler("main")

    logger.info("=" * 70)
    logger.info(f"tropmod {args.command} を開始します")
    logger.info("=" * 70)

    try:
        config = setup_environment(args)
        with timed(f"{args.command} の処理時間"):
            status = WORKFLOWS[args.command](args, config, _session(config))
    except Exception as e:
        handler.handle_exception(f"{args.command} の実行に失敗しました", e, {"操作": args.command})
        status = ErrorHandler.exit_code_for(e)

    if status == EXIT_OK:
        logger.info(f"tropmod {args.command} を正常に終了します")
    else:
        logger.error(f"tropmod {args.command} を終了コード {status} で終了します")
    return status


if __name__ == "__main__":
    sys.exit(main())
