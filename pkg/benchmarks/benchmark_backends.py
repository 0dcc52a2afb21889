"""Benchmark the compiled kernel core against the NumPy fallback.

Times the three hot paths on a full-size scenario (80 pairs, 30 CUs, 45
obstacles): LoS classification, the fused rate+gradient evaluation, and the
joint-search pattern walk.  Run:

    python benchmarks/benchmark_backends.py [--repeat N]
"""

import argparse
import time

import numpy as np

from risuav._kernels import _fallback
from risuav.channel import ChannelBuilder, beta_table, cu_prefactors, d2d_prefactors
from risuav.geometry import Position3
from risuav.scenario import GenerationConfig, generate_scenario

try:
    from risuav._kernels import _core
except ImportError:
    _core = None


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5, help="timing repetitions")
    args = parser.parse_args()

    scn = generate_scenario(GenerationConfig(), seed=0)
    builder = ChannelBuilder(scn)
    radio = scn.radio
    boxes = scn.obstacle_array
    plf_d2d = d2d_prefactors(radio)
    plf_cu = cu_prefactors(radio)
    beta = beta_table(radio)
    table = builder.table

    rng = np.random.default_rng(1)
    positions = rng.uniform(30.0, 270.0, (200, 2))

    state = builder.at(Position3(150.0, 150.0, 25.0))
    from risuav.channel import eta_all

    eta = eta_all(state, scn)
    b1 = beta[state.hop1_class.astype(np.intp)]
    b2 = beta[state.hop2_class.astype(np.intp)]

    backends = [("fallback", _fallback)]
    if _core is not None:
        backends.append(("compiled", _core))
    else:
        print("compiled core not available; benchmarking the fallback only")

    def classify_sweep(mod):
        for x, y in positions:
            mod.classify_to_point(scn.tx_array, x, y, 25.0, boxes)

    def eval_sweep(mod):
        for x, y in positions:
            mod.d2d_eval(x, y, 25.0, scn.tx_array, scn.rx_array, eta, b1, b2)

    def joint(mod):
        mod.joint_scan(
            150.0, 150.0, 25.0, 360, 1.0, 300, 0.0, 300.0, 0.0, 300.0,
            scn.tx_array, scn.rx_array, scn.cu_array, boxes,
            table.kappa_table, table.f_sq_table, plf_d2d, plf_cu, beta, 1.5,
        )

    cases = [
        ("classify 200 positions x 80 links", classify_sweep),
        ("rate+grad 200 positions x 80 pairs", eval_sweep),
        ("joint pattern walk (360 directions)", joint),
    ]

    results = {}
    for case_name, fn in cases:
        for backend_name, mod in backends:
            results[(case_name, backend_name)] = _time(lambda: fn(mod), args.repeat)

    width = max(len(c) for c, _ in cases)
    header = f"{'case':<{width}}  {'fallback':>12}"
    if _core is not None:
        header += f"  {'compiled':>12}  {'speedup':>8}"
    print(header)
    for case_name, _ in cases:
        fb = results[(case_name, "fallback")]
        line = f"{case_name:<{width}}  {fb * 1e3:>10.2f}ms"
        if _core is not None:
            co = results[(case_name, "compiled")]
            line += f"  {co * 1e3:>10.2f}ms  {fb / co:>7.1f}x"
        print(line)


if __name__ == "__main__":
    main()
