#!/usr/bin/env python3
"""Smoke test for the almost_toric_py extension module.

Build and stage the module first:

    cargo build -p almost-toric-py --release
    cp target/release/libalmost_toric_py.so python/almost_toric_py.so

then run `python3 python/smoke_test.py` from the repository root.
"""

import json
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import almost_toric_py as at

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def load_instance(name):
    with open(os.path.join(ROOT, "instances", name)) as fh:
        return fh.read()


def main():
    quartic = load_instance("surface-n2.json")

    polygon = json.loads(at.newton(quartic))
    assert polygon["classification"] == "almost_toric", polygon
    assert len(polygon["vertices"]) == 6, polygon["vertices"]
    assert len(polygon["lattice_points"]) == 20
    assert ["6", "0", "0", "6"] in polygon["vertices"]
    print("newton: 6 vertices, 20 lattice points")

    result = json.loads(at.implicitize_instance(quartic))
    assert result["degree"] == "12"
    assert result["terms"] == 20
    lead = result["polynomial"]["terms"][0]
    assert lead == {"coeff": "8", "exps": [6, 0, 0, 6]}, lead
    assert result["polynomial_text"].startswith("8*u0^6*u3^6")
    print("implicitize: degree 12, 20 terms, leading coefficient 8")

    deg = json.loads(at.degrees(quartic, seed=3))
    assert deg["agree"] is True
    assert deg["polygon"] == deg["tropical"] == deg["philippon_sombra"] == "12"
    print("degrees: 12 12 12 agree")

    assert at.verify(quartic, trials=25, seed=7) is True
    print("verify: pass")

    hexagon = load_instance("surface-n3.json")
    result = json.loads(at.implicitize_instance(hexagon))
    assert result["degree"] == "22"
    assert result["terms"] == 24
    print("implicitize: degree 22, 24 terms")

    gen_a = at.generate(3, 3, 2, seed=11)
    gen_b = at.generate(3, 3, 2, seed=11)
    assert gen_a == gen_b
    json.loads(gen_a)
    print("generate: deterministic")

    try:
        at.implicitize_instance(load_instance("constants-n1.json"))
    except ValueError as e:
        assert "not a hypersurface" in str(e)
        print("constants: raises ValueError(not a hypersurface)")
    else:
        raise AssertionError("expected ValueError for constants instance")

    print("smoke test OK")


if __name__ == "__main__":
    main()
