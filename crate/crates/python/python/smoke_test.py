"""Smoke test for the compiled `minsurf` module.

Build it first, e.g. `maturin develop --release` in crates/python, or copy
target/release/libminsurf_py.so to minsurf.so on PYTHONPATH.
"""

import math

import minsurf


def main():
    assert abs(minsurf.sigma_of_lambda(1.0) - (3 + math.sqrt(5)) / 2) < 1e-12
    assert abs(minsurf.q_min(0.0) - 1.0) < 1e-12
    x = minsurf.classical_point(1.0, minsurf.q_min(1.0), 0.0)
    assert abs(x[2]) < 1e-14

    end = minsurf.flux(2.0, "end")
    assert max(abs(v) for v in end) < 1e-7
    assert minsurf.shiffman_max(2.0, count=200) < 1e-9

    hier = minsurf.hierarchy(2)
    assert hier[2] == "u'' + 3 u^2", hier

    verts, faces = minsurf.fundamental_piece(2.0, 0.1, 40, 60)
    assert len(verts) == 2400
    assert len(faces) == 2 * 39 * 59
    ext, _ = minsurf.extended_surface(2.0, 0.1, 10, 12, 0)
    assert len(ext) == 8 * 120

    k = minsurf.fundamental_constants(2.0)
    assert abs(k["t0"][2] - 2 * k["c"][2]) < 1e-9

    r = minsurf.register(1.0)
    assert r["max_relative_error"] < 1e-3
    print("smoke test passed: scale %.6f, error %.1e" % (r["scale"], r["max_relative_error"]))


if __name__ == "__main__":
    main()
