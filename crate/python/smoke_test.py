"""Smoke test for the sadic extension module.

Build and install it first:  pip install --no-build-isolation ./crates/py
"""

from fractions import Fraction

import sadic


def main():
    sigma0 = sadic.Morphism(["a", "b"], ["c", "d"], {"a": "cd", "b": "dc"})
    sigma1 = sadic.Morphism(["x", "y"], ["a", "b"], {"x": "aab", "y": "bba"})
    tail = sadic.Morphism(["x", "y"], ["x", "y"], {"x": "xx", "y": "yy"})
    seq = sadic.DirectiveSequence.prefix_stationary([sigma0, sigma1], tail, 16)

    assert seq.telescope(0, 2).apply("x") == "cdcddc"
    assert sigma1.incidence_matrix() == [[2, 1], [1, 2]]

    mu = sadic.WeightTable.characteristic(["a", "b"], "aab", 8)
    assert mu.letter_frequency() == [Fraction(2), Fraction(1)]
    image = mu.transfer(sigma0, 6)
    assert image == sadic.WeightTable.characteristic(["c", "d"], "cdcddc", 6)
    assert image.get("cd") == image.get("dc") == 2
    assert image.kirchhoff_consistent()

    assert seq.cone(0, 3)["rank"] == 1
    assert seq.cone(1, 3)["rank"] == 2
    assert seq.critical_level(6, 3)["apparent_critical_level"] == 1

    report = sadic.critical_level_example_report()
    assert report["matches_expected"], report

    fib = sadic.DirectiveSequence.stationary(sadic.Morphism(["a", "b"], ["a", "b"], {"a": "ab", "b": "a"}), 30)
    assert [len(v) for v in fib.language(0, 6, 12).values()] == [2, 3, 4, 5, 6, 7]
    assert fib.beta_minus(8) == 34

    tm = sadic.DirectiveSequence.stationary(sadic.Morphism(["a", "b"], ["a", "b"], {"a": "ab", "b": "ba"}), 20)
    s, bound = tm.evaluate_tower([Fraction(1, 8192), Fraction(1, 8192)], 12, "aa")[-1]
    assert 0 <= Fraction(1, 6) - s <= bound
    assert tm.recognizability(0, 2)["verdict"] == "CLEAR"

    try:
        fib.cone(0, 99)
    except sadic.ExhaustionError:
        pass
    else:
        raise AssertionError("expected ExhaustionError")

    diag = sadic.diagonal_report(3, [4, 8, 16])
    assert diag["base_measure_rank"] == 3 and diag["towers_valid"]

    print("sadic smoke test passed")


if __name__ == "__main__":
    main()
