"""Smoke test for the logcirc Python bindings.

Uses an installed `logcirc` module if there is one; otherwise builds the
extension with cargo and loads it from the target directory.
"""
import importlib.util
import json
import pathlib
import subprocess
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import logcirc
        return logcirc
    except ImportError:
        pass
    subprocess.run(
        ["cargo", "build", "-p", "logcirc-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    lib = ROOT / "target" / "debug" / "liblogcirc_py.so"
    spec = importlib.util.spec_from_file_location("logcirc", lib)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def main():
    lc = load()

    k = lc.Field("d=5")
    assert (k.conductor, k.degree) == (5, 2)
    assert k == lc.Field.quadratic(5)
    assert lc.Field("f=9;H=8").degree == 3
    try:
        lc.Field("f=10;H=9")
    except ValueError as e:
        assert "true conductor 5" in str(e)
    else:
        raise AssertionError("non-minimal conductor accepted")

    # η of Q(√5) is 2 - ζ - ζ^4 = 3 + ζ^2 + ζ^3 in the power basis.
    e = lc.eta(k)
    assert e.numerator == [3, 0, 1, 1], e.numerator
    assert e == lc.Element.integer(5, 2) - lc.Element.zeta(5, 1) - lc.Element.zeta(5, 4)
    assert e.norm(k, lc.Field.of_conductor(5)[0]) == e
    assert lc.Element.from_record(e.record()) == e

    q2 = lc.Field("d=2")
    holds, witness = lc.is_log_unit(q2, lc.predicted_log_unit(q2, 3), 3, 8)
    assert holds and witness is None
    d = lc.log_divisor(q2, lc.Element.from_record("f=8; num=[2,-1,0,1]; den=1"), 3, 8)
    assert d["coefficients"]["2.0"] == 1 and d["degree"] == 0

    # Log 4 = 2 Log 2 mod 3^6.
    m = 3 ** 6
    assert lc.iwasawa_log(4, 3, 6) == (2 * lc.iwasawa_log(2, 3, 6)) % m
    assert lc.iwasawa_log(3, 3, 6) == 0

    g = lc.class_group(lc.Field("d=79"), 3, 8)
    assert g["class_number"] == 3 and g["cl"]["invariants"] == [3]
    assert lc.log_class_group(k, 3, 8)["text"] == "trivial (precision 8)"
    assert lc.log_class_group(lc.Field("d=257"), 3, 8)["invariants"] == [3]

    r = lc.circular_rank(lc.Field("f=9;H=8"), 3, 8)
    assert r["pass"] and r["computed"] == 3, r
    assert lc.tpc_check(lc.Field("d=257"), 3, 8)["status"] == "pass"
    assert lc.solomon_check(q2, 3, 8)["status"] == "pass"

    code, text = lc.verify("eta-units,car-ranks", "ell = 3\nd = 2,5\n")
    report = json.loads(text)
    assert code == 0 and report["schema"] == "logcirc-report/1"
    assert "timing" not in report
    assert report["summary"]["eta-units"]["pass"] == 2

    print("python smoke test: ok")


if __name__ == "__main__":
    sys.exit(main())
