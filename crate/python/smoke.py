"""Smoke test for the udcr Python module. Run after
`pip install --no-build-isolation ./crates/py`."""

import itertools
import json

import udcr

FIG1 = "p cnf 4 3\n-1 2 3 0\n1 2 4 0\n-2 3 4 0\n"


def main():
    f = udcr.Formula.from_dimacs(FIG1)
    assert (f.num_vars, f.num_clauses) == (4, 3)
    r = udcr.compile(f)
    print(r, r.node_count, "nodes")

    p = r.realize([True, False, True, False])
    report = r.verify(p)
    assert report.passed and not report.violations and report.weak_contacts
    assert r.verify(p, mode="tolerant", eps=0.0).passed
    assert udcr.verify(r.caterpillar_json(), p).passed

    realized = 0
    for a in itertools.product([False, True], repeat=4):
        try:
            r.realize(list(a))
            realized += 1
            assert f.is_satisfied(list(a))
        except udcr.DomainError:
            assert not f.is_satisfied(list(a))
    assert realized == 10, realized

    try:
        r.realize([True])
        raise AssertionError("short assignment accepted")
    except udcr.InputError:
        pass

    svg = r.render(p)
    assert svg.count("<circle") == r.node_count

    cat = json.dumps({"backbone": ["a", "b"], "leaves": {}, "rotation": {"a": ["b"], "b": ["a"]}})
    spec = json.dumps({"anchor": {"node": "a", "at": [0, 0]}, "bounds": {"min": [-2, -2], "max": [2, 2]}})
    found, truncated = udcr.search(cat, spec)
    exhaustive, _ = udcr.search(cat, spec, exhaustive=True)
    assert len(found) == len(exhaustive) == 6 and not truncated
    moved = udcr.Placement({"a": (0, 0), "b": (4, 0)})
    assert not udcr.verify(cat, moved).passed

    for g in udcr.gadgets():
        if g.id == "clause":
            assert g.count() == g.expected_counts()
        print(g, g.states())

    print("ok")


if __name__ == "__main__":
    main()
