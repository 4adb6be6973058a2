#!/usr/bin/env python3
"""Smoke test for the rsabench extension module.

Build the module first:

    cargo build -p rsabench-py --release --features extension-module

then run this script; it locates the built library under target/release
and imports it as `rsabench`.
"""

import importlib.util
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        REPO / "target" / "release" / "librsabench.so",
        REPO / "target" / "release" / "librsabench.dylib",
        REPO / "target" / "release" / "rsabench.dll",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit(
            "librsabench not found; run "
            "`cargo build -p rsabench-py --release --features extension-module`"
        )
    suffix = ".pyd" if built.suffix == ".dll" else ".so"
    tmp = Path(tempfile.mkdtemp()) / f"rsabench{suffix}"
    shutil.copy(built, tmp)
    spec = importlib.util.spec_from_file_location("rsabench", tmp)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def main():
    rb = load_module()

    topo = rb.Topology.builtin("six_node")
    assert topo.node_count == 6 and topo.link_count == 16, repr(topo)
    assert sorted(topo.nodes()) == [str(i) for i in range(1, 7)]

    cost239 = rb.Topology.builtin("cost239")
    assert cost239.node_count == 11 and cost239.link_count == 52

    # Round-trip through JSON.
    again = rb.Topology.from_json(topo.to_json())
    assert again.node_count == topo.node_count

    paths = topo.k_shortest_paths("1", "4", 3)
    assert len(paths) == 3 and len(paths[0]) <= len(paths[-1])

    tm = rb.TrafficMatrix.generate(topo, 8, 1, 4, seed=7)
    assert len(tm) == 8
    tm2 = rb.TrafficMatrix.from_csv(topo, tm.to_csv(topo))
    assert tm2.demands() == tm.demands()

    heur = rb.solve_rsa_msf(topo, tm)
    assert heur.validate(topo, tm) == []
    exact = rb.solve_rsa_exact(topo, tm)
    assert exact["status"] == "Optimal"
    assert exact["lower_bound"] <= exact["objective"] <= heur.used_slice_count()
    sol = exact["solution"]
    assert sol is not None and sol.used_slice_count() == exact["objective"]
    assert rb.lower_bound(topo, tm) == exact["lower_bound"]

    # Assignment JSON round-trip.
    reload = rb.Assignment.from_json(sol.to_json())
    assert reload.used_slice_count() == sol.used_slice_count()

    ga_asg, log = rb.solve_rwa_ga(topo, tm, seed=7)
    fits = [f for _, f in log]
    assert fits == sorted(fits, reverse=True) or all(
        a >= b for a, b in zip(fits, fits[1:])
    )
    rwa = rb.solve_rwa_exact(topo, tm)
    assert rwa["objective"] <= ga_asg.fitness()

    ids = [d[0] for d in tm.demands()]
    ff = rb.solve_rwa_first_fit(topo, tm, ids)
    assert ff.validate(topo, tm.to_rwa()) == []

    tiny = rb.TrafficMatrix.generate(topo, 2, 1, 2, seed=1)
    oracle = rb.brute_force_oracle(topo, tiny, slot_count=8)
    ref = rb.solve_rsa_exact(topo, tiny, slot_count=8)
    assert oracle == ref["objective"], (oracle, ref["objective"])

    lp = rb.emit_lp(topo, tm, slot_count=20)
    assert lp.startswith("\\") and "Minimize" in lp and lp.rstrip().endswith("End")

    assert rb.gap_percent(4, 5) == 25.0
    assert abs(rb.spectral_saving_percent(50.0, 100.0) - 50.0) < 1e-12

    print("smoke test passed")


if __name__ == "__main__":
    main()
