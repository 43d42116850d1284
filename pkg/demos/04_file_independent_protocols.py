"""Masked (file-independent) retrieval: Protocol 2 and its asymmetric variant.

Every query is a fresh uniform mask, possibly shifted by one wanted symbol, so
the download does not grow with the number of files.
"""

from __future__ import annotations

from codedpir.code import paper_codes
from codedpir.dss import encode_store, generate_files, respond_all
from codedpir.protocols import audit_privacy, masked_layout, plan_protocol2, plan_protocolA_inf, recover
from codedpir.ratematrix import find_min_ratio


def main() -> None:
    for name, code in paper_codes().items():
        rm = find_min_ratio(code).matrix
        for label, planner, asym in (("P2", plan_protocol2, False), ("A-inf", plan_protocolA_inf, True)):
            beta = masked_layout(rm, asymmetric=asym).beta
            files = generate_files(3, beta, code.k, code.field, seed=1)
            store = encode_store(files, code)
            plans = {m: planner(store, rm, m, seed=5) for m in (1, 2, 3)}
            plan = plans[2]
            ok = (recover(plan, respond_all(store, plan.queries())) == files.file(2)).all()
            print(
                f"{name} {label:<5} beta={beta} D={plan.total_download:<3} rate={str(plan.rate):<5} "
                f"recovered={ok} private={audit_privacy(plans).passed}"
            )


if __name__ == "__main__":
    main()
