"""Shared hypothesis strategies: small finite sets, functions and signatures."""

from __future__ import annotations

from hypothesis import settings, strategies as st

from toposforge.finset import FinFunction, FinSet, Signature

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def finsets(max_size: int = 3, prefix: str = "x"):
    return st.integers(0, max_size).map(lambda n: FinSet(f"{prefix}{i}" for i in range(n)))


@st.composite
def functions(draw, max_size: int = 3, dom=None, cod=None):
    Y = cod if cod is not None else draw(finsets(max_size, "y"))
    if dom is not None:
        X = dom
    elif len(Y):
        X = draw(finsets(max_size, "x"))
    else:
        X = FinSet()
    table = {x: draw(st.sampled_from(Y.elements)) for x in X}
    return FinFunction(X, Y, table)


@st.composite
def surjections(draw, max_size: int = 3):
    Y = draw(finsets(max_size, "y"))
    extra = draw(st.integers(0, max_size))
    xs = [f"x{i}" for i in range(len(Y) + extra)]
    values = list(Y.elements) + [draw(st.sampled_from(Y.elements)) for _ in range(extra)] if len(Y) else []
    return FinFunction(FinSet(xs[:len(values)]), Y, dict(zip(xs, values)))


@st.composite
def signatures(draw, max_a: int = 3, max_b: int = 3):
    A = draw(st.integers(1, max_a).map(lambda n: FinSet(f"a{i}" for i in range(n))))
    nb = draw(st.integers(0, max_b))
    B = FinSet(f"b{i}" for i in range(nb))
    return Signature(FinFunction(B, A, {b: draw(st.sampled_from(A.elements)) for b in B}))


def predicted_count(sig: Signature, depth: int) -> int:
    """Number of terms of height <= depth, by the recursion t_{d+1} = Σ_a t_d^|B_a|."""
    t = 0
    for _ in range(depth):
        t = sum(t ** len(sig.arity(a)) for a in sig.A)
    return t


# one line per acceptance criterion, printed after the run
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
