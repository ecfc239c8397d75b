import sys
from fractions import Fraction
from pathlib import Path

import pytest

# プロジェクトのルートディレクトリをPYTHONPATHに追加
root_dir = Path(__file__).parent.parent
sys.path.append(str(root_dir))

from src.modules.acceptance_report import (
    COLUMNS,
    FAIL,
    INFO,
    PASS,
    TABLE_ONE,
    AcceptanceReport,
    chi_genus_two,
    genus_two_signed_poly,
    table_one,
)


class TestClosedForms:
    def test_chi_genus_two(self):
        assert [chi_genus_two(n) for n in range(6)] == [1, 1, 1, 1, 0, -4]
        assert all(chi_genus_two(n).denominator == 1 for n in range(20))

    def test_signed_poly_values(self):
        assert genus_two_signed_poly(0).as_list() == [1]
        assert genus_two_signed_poly(1).as_list() == [1]
        assert all(Fraction(genus_two_signed_poly(n).euler) == chi_genus_two(n) for n in range(11))


class TestTableOne:
    """C の 2-キューブ上の構造写像の値"""

    def test_all_rows_reproduce(self):
        rows = table_one()
        assert len(rows) == len(TABLE_ONE) == 10
        assert all(row["f_ok"] and row["g_ok"] for row in rows)

    def test_degenerate_rows(self):
        starred = [row["cube"] for row in table_one() if row["f"] == "*"]
        assert starred == ["d1 d1", "d1 e1", "d1 e2", "d1 d2", "e1 d1", "e1 d2"]


class TestAcceptanceReport:
    @pytest.fixture
    def report(self):
        return AcceptanceReport(seed=0)

    def test_rows_have_columns(self, report):
        report.check_delta_two()
        assert set(report.rows[0]) == set(COLUMNS)
        assert all(row["status"] == PASS for row in report.rows)

    def test_table_one_check(self, report):
        report.check_table_one()
        assert [row["status"] for row in report.rows] == [PASS]

    def test_genus_one_check(self, report):
        report.check_genus_one()
        assert [row["status"] for row in report.rows] == [PASS, PASS]

    def test_mismatch_is_fail(self, report):
        report._add("x", "test", 1, 2)
        report._add("y", "test", "-", 3, INFO)
        assert [row["status"] for row in report.rows] == [FAIL, INFO]

    def test_exception_becomes_fail_row(self, report):
        def broken():
            raise RuntimeError("boom")

        report._run("z", "broken check", broken)
        assert report.rows[-1]["status"] == FAIL
        assert report.rows[-1]["id"] == "z"

    @pytest.mark.slow
    def test_full_run(self, report):
        table = report.run()
        assert list(table.columns) == COLUMNS
        assert AcceptanceReport.all_passed(table)

    @pytest.mark.slow
    def test_delta_three_counts_simplices_at_g2(self, report):
        report.check_delta_three()
        row = next(r for r in report.rows if "3-単体の数" in r["claim"])
        assert row["expected"] == row["computed"] == "1"
        assert row["status"] == PASS

    @pytest.mark.slow
    def test_burnside_check_includes_pointwise_stabilizers(self, report):
        report.check_burnside()
        assert [row["id"] for row in report.rows] == ["6", "6"]
        assert [row["status"] for row in report.rows] == [PASS, PASS]
