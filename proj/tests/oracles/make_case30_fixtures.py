"""Writes the case30 case file and a frozen power-flow oracle computed with PYPOWER.

Run once when the fixture needs refreshing:
    python3 tests/oracles/make_case30_fixtures.py
"""
import pathlib

from pypower.api import ppoption, runpf
from pypower.case30 import case30

ROOT = pathlib.Path(__file__).resolve().parents[2]


def fmt_row(row, ncols):
    return "\t" + "\t".join(f"{v:.10g}" for v in row[:ncols]) + ";"


def write_case(ppc, path):
    lines = [
        "function mpc = case30",
        "% Power flow data for 30 bus, 6 generator case (PYPOWER/MATPOWER case30).",
        "mpc.version = '2';",
        "",
        "%% system MVA base",
        f"mpc.baseMVA = {ppc['baseMVA']:g};",
        "",
        "%% bus data",
        "%\tbus_i\ttype\tPd\tQd\tGs\tBs\tarea\tVm\tVa\tbaseKV\tzone\tVmax\tVmin",
        "mpc.bus = [",
    ]
    lines += [fmt_row(r, 13) for r in ppc["bus"]]
    lines += ["];", "", "%% generator data",
              "%\tbus\tPg\tQg\tQmax\tQmin\tVg\tmBase\tstatus\tPmax\tPmin",
              "mpc.gen = ["]
    lines += [fmt_row(r, 10) for r in ppc["gen"]]
    lines += ["];", "", "%% branch data",
              "%\tfbus\ttbus\tr\tx\tb\trateA\trateB\trateC\tratio\tangle\tstatus\tangmin\tangmax",
              "mpc.branch = ["]
    lines += [fmt_row(r, 13) for r in ppc["branch"]]
    lines += ["];", ""]
    path.write_text("\n".join(lines))


def main():
    ppc = case30()
    write_case(ppc, ROOT / "data" / "cases" / "case30.m")

    opt = ppoption(PF_TOL=1e-13, PF_MAX_IT=30, VERBOSE=0, OUT_ALL=0, ENFORCE_Q_LIMS=0)
    res, ok = runpf(ppc, opt)
    assert ok
    bus = res["bus"]
    gen = res["gen"]
    slack_bus = int(bus[bus[:, 1] == 3][0, 0])
    slack_p = gen[gen[:, 0] == slack_bus][:, 1].sum()
    out = ["# PYPOWER runpf, case30, nominal demand, PF_TOL=1e-13, no Q limits",
           f"slack_p_mw,{slack_p:.12f}",
           "bus,vm_pu,va_deg"]
    out += [f"{int(b[0])},{b[7]:.12f},{b[8]:.12f}" for b in bus]
    (ROOT / "tests" / "fixtures" / "case30_pf_oracle.csv").write_text("\n".join(out) + "\n")


if __name__ == "__main__":
    main()
