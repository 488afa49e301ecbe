"""Smoke test for the outerkit_py extension.

Build and install with `maturin develop -m crates/py/Cargo.toml --release`
(or put the built shared library on PYTHONPATH as `outerkit_py.so`), then run
`python python/smoke_test.py`.
"""

import json

import outerkit_py as ok


def main():
    g = ok.Groupoid.generate("bundle:3:4")
    assert len(g) == 12
    assert g.validate() == []
    assert g.count_composable(2) == 3 * 4**2

    round_trip = ok.Groupoid.from_json(g.to_json())
    assert json.loads(round_trip.to_json()) == json.loads(g.to_json())

    c = ok.Cochain.generator("bundle:3:4")
    verdict = c.check_cocycle(g)
    assert verdict["violations"] == 0, verdict
    assert verdict["tuples_checked"] == g.count_composable(4)
    rows = c.rows(g)
    assert ok.Cochain.from_rows(g, 3, rows).rows(g) == rows
    # The generator of H^3(Z/4) at (1, 2, 2) is exp(2 pi i / 4).
    assert c.angle([1, 2, 2]) == (1, 4)

    b = ok.Cochain.from_rows(g, 2, [[1, 2, 1, 8]])
    assert b.coboundary(g).check_cocycle(g)["violations"] == 0

    pair = ok.Groupoid.generate("pair:3")
    mu = ok.Measure.uniform(pair)
    assert all(v == 0.0 for v in mu.reiter_profile(pair, 1, 12))
    assert mu.fixed_space_dimension(pair, pair.units()[0]) == 1
    assert abs(sum(mu.weights()) - 3.0) < 1e-12

    report = ok.run(g, c, ok.Measure.perturbed(g), suites="all", level=2)
    assert report["report_version"] == ok.REPORT_VERSION
    failed = [
        (s["suite"], ch["name"])
        for s in report["suites"]
        for ch in s["checks"]
        if not ch["passed"] and not ch.get("informational", False)
    ]
    assert report["passed"], failed
    assert [s["suite"] for s in report["suites"]] == [
        "axioms", "cocycle", "walk", "model", "invariants", "appendix",
    ]

    try:
        ok.Groupoid.from_json('{"units": [0,')
    except ValueError as e:
        assert "<python>:1:" in str(e), e
    else:
        raise AssertionError("malformed JSON was accepted")

    print("smoke test passed:", ", ".join(ok.corpus_kinds()))


if __name__ == "__main__":
    main()
