"""Smoke test for the feyncat extension module.

Build and run from the repository root:

    cargo build --release -p feyncat-py --features extension-module
    cp target/release/libfeyncat.so python/feyncat.so
    python3 python/smoke_test.py
"""

from fractions import Fraction

import feyncat

assert "surj-ord" in feyncat.instances()

h = feyncat.Algebra("surj-ord")
x = h.parse("pi(3)")
d = h.coproduct(x)
assert len(d) == 4, str(d)
assert h.antipode(h.parse("pi(1)")) == h.one()
assert h.counit(h.one()) == Fraction(1)

y = Fraction(1, 2) * x - h.parse("pi(2)") * h.parse("pi(2)")
assert dict((tuple(k), c) for k, c in y.terms())[("pi(3)",)] == Fraction(1, 2)
conv = h.product(h.antipode(x), h.one())
assert isinstance(str(conv), str)

trees = feyncat.Algebra("ck-tree-sym", ring="integer")
ladder = trees.parse("ladder(4)")
assert len(trees.coproduct(ladder)) == 5
assert "\\otimes" in trees.coproduct(ladder).latex()

banana = (
    '{"vertices":["a","b"],"flags":["0","1","2","3","4","5"],'
    '"involution":[["0","1"],["2","3"]],'
    '"boundary":{"0":"a","1":"b","2":"a","3":"b","4":"a","5":"b"}}'
)
graphs = feyncat.Algebra("ck-graph-core")
g = graphs.parse("graph(" + banana + ")")
coeffs = [c for _, _, c in graphs.coproduct(g).terms()]
assert Fraction(2) in coeffs, coeffs
assert feyncat.canonical_key(banana) == str(g)

report = feyncat.Algebra("joyal").verify(max_degree=3)
assert report.passed, str(report)
assert any(name == "antipode" for name, *_ in report.checks)

try:
    h.parse("pi(0)")
except ValueError:
    pass
else:
    raise AssertionError("pi(0) should be rejected")

print("smoke test passed")
