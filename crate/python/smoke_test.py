"""Smoke test for the classchar_py extension.

Build first: pip install --no-build-isolation -e crates/classchar-py
"""

import math

import classchar_py as cc


def main():
    g = cc.Group("SL(2,3)")
    assert g.order == 24 and len(g) == 24
    assert g.n == 2 and g.q == 3
    classes = g.classes()
    assert sum(c["size"] for c in classes) == 24
    assert sorted(c["size"] for c in classes) == [1, 1, 4, 4, 4, 4, 6]

    t = g.chartable()
    assert sum(d * d for d in t.degrees) == 24
    t.check_orthogonality()
    assert not t.is_quasisimple()

    s = cc.Group("SL(3,2)")
    st = s.chartable()
    assert st.degrees == [1, 3, 3, 6, 7, 8]
    assert st.is_quasisimple()
    for row in st.values():
        assert abs(complex(*row[0]).imag) < 1e-12

    # S6 has eleven classes and Σχ(1)² = 720
    sp = cc.Group("Sp(4,2)")
    assert sp.num_classes() == 11
    assert sum(d * d for d in sp.chartable().degrees) == 720

    frob = cc.verify("frob", s)
    assert frob["verdict"] == "pass", frob

    l1 = cc.walk(s, 2, steps=8)
    half = cc.walk(s, 2, steps=8, half=True)
    assert all(math.isclose(a, 2 * b, abs_tol=1e-12) for a, b in zip(l1["tv"], half["tv"]))
    assert l1["formula_agrees"] and l1["monotone"]
    assert l1["mixing_time"] is not None

    th = cc.thompson(s)
    assert th["witness"] is not None
    assert cc.thompson(sp)["witness"] is None

    cover = cc.cover(s, th["witness"])
    assert cover["full"]

    pw = cc.powerword(cc.Group("SL(2,5)"), 30)
    assert pw["verdict"] in ("pass", "observational")

    try:
        cc.Group("XX(2,2)")
    except ValueError:
        pass
    else:
        raise AssertionError("bad spec accepted")

    print("classchar_py", cc.__version__, "smoke test ok")


if __name__ == "__main__":
    main()
