"""Closed-form rates for the example codes, as exact fractions and as a table.

Shows how the symmetric and asymmetric rates approach their asymptotic values
as the number of files grows, and prints the asymptotic rate table.
"""

from __future__ import annotations

from codedpir.code import direct_sum_decompose, paper_codes
from codedpir.rates import INF, RateReport, mds_pir_capacity, rate_asymmetric, rate_symmetric, render, reports_to_csv
from codedpir.ratematrix import find_min_ratio


def main() -> None:
    codes = paper_codes()
    print("C1 with kappa/nu = 2/3 as the number of files grows:")
    print("   f   R_S        R_A       C_f")
    for f in (1, 2, 3, 5, 10, INF):
        rs, ra, c = rate_symmetric(2, 3, 3, 5, f), rate_asymmetric(2, 3, f), mds_pir_capacity(5, 3, f)
        print(f"  {str(f):>3}  {str(rs):<9} {str(ra):<9} {render(c)}")
    reports = []
    for name, code in codes.items():
        best = find_min_ratio(code)
        d = direct_sum_decompose(code)
        parts = d.shapes if name == "C1" else None
        reports.append(RateReport.build(name, code.n, code.k, best.kappa, best.nu, INF, parts=parts))
    print("\nAsymptotic rate table:")
    print(reports_to_csv(reports))


if __name__ == "__main__":
    main()
