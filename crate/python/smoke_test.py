#!/usr/bin/env python3
"""Smoke test for the nscap_py extension module.

Builds the cdylib with cargo if needed, loads it, and runs a handful of
end-to-end checks: the state-fading channel's assisted/classical gap, the
virtual-signaling equality on a small channel, and the Blackwell region's
sum rate.

Usage: python3 python/smoke_test.py
"""

import json
import math
import shutil
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build_and_load():
    subprocess.run(
        ["cargo", "build", "-p", "nscap-py", "--release"],
        cwd=ROOT,
        check=True,
    )
    lib = ROOT / "target" / "release" / "libnscap_py.so"
    if not lib.exists():  # macOS
        lib = ROOT / "target" / "release" / "libnscap_py.dylib"
    stage = ROOT / "build" / "pydist"
    stage.mkdir(parents=True, exist_ok=True)
    target = stage / "nscap_py.so"
    shutil.copy2(lib, target)
    sys.path.insert(0, str(stage))
    import nscap_py

    return nscap_py


def close(a, b, tol, label):
    assert abs(a - b) <= tol, f"{label}: {a} vs {b} (tol {tol})"
    print(f"ok  {label}: {a:.9f} ~= {b:.9f}")


def main():
    ns = build_and_load()

    # entropy sanity
    close(ns.entropy([0.25, 0.25, 0.25, 0.25]), 2.0, 1e-12, "uniform entropy")

    # state-fading channel: assisted optimum is perfect, classical is not
    fd = ns.Channel.fading_dirt(2)
    close(ns.csir_capacity(fd), 1.0, 1e-6, "state-fading capacity q=2")
    sc_ns = ns.Scenario(fd, [2], "ns")
    eta, box_json = sc_ns.optimal_success()
    close(eta, 1.0, 1e-7, "assisted success q=2")
    box = json.loads(box_json)
    assert "parties" in box and "probs" in box, "box table round-trips as JSON"
    sc_c = ns.Scenario(fd, [2], "c")
    close(sc_c.classical_optimal_success(), 0.75, 1e-12, "classical success q=2")
    gp = ns.gelfand_pinsker_estimate(fd, restarts=16)
    assert 0.5 - 1e-6 <= gp < 1.0, f"one-sided state capacity estimate {gp}"
    print(f"ok  transmitter-only state estimate {gp:.6f} < 1")

    # virtual signaling: revealing the state to the receiver changes nothing
    doc = {
        "kind": "channel_with_state",
        "x": 2,
        "y": [2],
        "s": 2,
        "p_s": [0.6, 0.4],
        "kernel": [[0.9, 0.1], [0.3, 0.7], [0.2, 0.8], [0.5, 0.5]],
    }
    ch = ns.Channel.from_json(json.dumps(doc))
    eta_plain, _ = ns.Scenario(ch, [2], "ns").optimal_success()
    eta_aug, _ = ns.Scenario(ch.augment_with_csir(), [2], "ns").optimal_success()
    close(eta_plain, eta_aug, 1e-9, "virtual signaling equality")

    # Blackwell region sum rate
    bw = ns.Channel.blackwell()
    pts = ns.region(bw, "semidet", directions=9, restarts=16)
    sum_rate = 2.0 * pts[4][2]
    close(sum_rate, math.log2(3.0), 1e-3, "blackwell sum rate")

    # erasure scaling
    pts_e = ns.region(bw, "semidet-erasure", directions=9, restarts=16,
                      gamma1=0.5, gamma2=0.5)
    close(2.0 * pts_e[4][2], 0.5 * math.log2(3.0), 1e-3, "erased sum rate")

    # broadcast with side information through the scenario JSON schema
    scenario = {
        "channel": doc | {},  # placeholder replaced below
        "messages": [2, 2],
        "assist": "ns_full",
        "si": {"1": [2]},
    }
    scenario["channel"] = json.loads(bw.to_json())
    sc = ns.Scenario.from_json(json.dumps(scenario))
    eta_si, _ = sc.optimal_success()
    assert 0.0 <= eta_si <= 1.0 + 1e-9
    print(f"ok  side-information scenario solves (eta = {eta_si:.6f})")

    print("smoke test passed")


if __name__ == "__main__":
    main()
