import math

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from corpus import derivative_corpus, expression_corpus
from ellgrad import hexpr
from ellgrad.hexpr import (
    BinOp,
    Const,
    EvalDomainError,
    ExprSyntaxError,
    Fun,
    NonLiteralExponentError,
    Num,
    Param,
    ParameterBindingError,
    Pow,
    UnknownFunctionError,
    Var,
    differentiate,
    evaluate,
    parameters,
    parse,
    to_text,
)


class TestParse:
    def test_exp_of_product(self):
        e = parse("exp(2*s)")
        assert e == Fun("exp", BinOp("*", Num(2.0), Var()))
        assert parameters(e) == frozenset()

    def test_parameter_set(self):
        e = parse("l1*s + l2*exp(b*s)")
        assert parameters(e) == frozenset({"l1", "l2", "b"})

    def test_non_literal_exponent_rejected(self):
        with pytest.raises(NonLiteralExponentError):
            parse("s ^ s")
        with pytest.raises(NonLiteralExponentError):
            parse("s ^ (2)")

    def test_signed_exponent_accepted(self):
        assert parse("s ^ -2") == Pow(Var(), -2.0)

    def test_unknown_function(self):
        with pytest.raises(UnknownFunctionError):
            parse("tan(s)")

    def test_syntax_error_carries_offset(self):
        with pytest.raises(ExprSyntaxError) as err:
            parse("1 + @")
        assert err.value.offset == 4

    def test_trailing_garbage(self):
        with pytest.raises(ExprSyntaxError):
            parse("s s")

    def test_empty(self):
        with pytest.raises(ExprSyntaxError):
            parse("   ")

    def test_unclosed_paren(self):
        with pytest.raises(ExprSyntaxError):
            parse("exp(s")

    def test_precedence(self):
        assert parse("1 + 2*s") == BinOp("+", Num(1.0), BinOp("*", Num(2.0), Var()))
        # unary minus binds the whole power
        assert parse("-s^2") == Neg_of(Pow(Var(), 2.0))

    def test_pi_is_a_named_constant(self):
        assert parse("pi") == Const("pi")
        assert to_text(parse("pi")) == "pi"

    def test_constant_folding(self):
        assert parse("2*3 + 1") == Num(7.0)
        assert parse("1/0") == BinOp("/", Num(1.0), Num(0.0))  # fold skipped


def Neg_of(e):
    from ellgrad.hexpr import Neg

    return Neg(e)


class TestPrintRoundTrip:
    def test_fully_parenthesized(self):
        assert to_text(parse("l1*s + l2*exp(b*s)")) == "((l1 * s) + (l2 * exp((b * s))))"

    @pytest.mark.parametrize("text", [
        "exp(2*s)",
        "pi/2 - arctan(s)",
        "-exp(2*s)",
        "s^2 - 1/s",
        "a*sin(s) + cos(b*s)^3",
    ])
    def test_examples_round_trip(self, text):
        e = parse(text)
        assert parse(to_text(e)) == e

    def test_corpus_round_trip_and_eval_identity(self):
        import random

        rng = random.Random(20240811)
        for e in expression_corpus(seed=7, count=150):
            again = parse(to_text(e))
            assert again == e
            # identical structure must evaluate identically
            pvals = {name: rng.uniform(-2, 2) for name in parameters(e)}
            hits = 0
            while hits < 100:
                s = rng.uniform(-3, 3)
                try:
                    v1 = evaluate(e, s, pvals)
                except hexpr.ExprError:
                    hits += 1
                    continue
                v2 = evaluate(again, s, pvals)
                assert v1 == v2 or (math.isnan(v1) and math.isnan(v2))
                hits += 1


_leaves = st.one_of(
    st.floats(min_value=-50, max_value=50, allow_nan=False).map(
        lambda v: Num(round(v, 6))
    ),
    st.just(Var()),
    st.sampled_from([Param("a"), Param("beta"), Param("x_1")]),
    st.just(Const("pi")),
)


def _extend(children):
    import ellgrad.hexpr as hx

    return st.one_of(
        st.tuples(children, children).map(lambda ab: hx.add(*ab)),
        st.tuples(children, children).map(lambda ab: hx.sub(*ab)),
        st.tuples(children, children).map(lambda ab: hx.mul(*ab)),
        st.tuples(children, children).map(lambda ab: hx.div(*ab)),
        children.map(hx.neg),
        st.tuples(children, st.sampled_from([2.0, 3.0, 0.5, -1.0])).map(
            lambda t: hx.pow_(*t)
        ),
        st.tuples(st.sampled_from(hexpr.FUNCTIONS), children).map(
            lambda t: hx.fun(*t)
        ),
    )


@given(st.recursive(_leaves, _extend, max_leaves=25))
@settings(max_examples=300, deadline=None)
def test_roundtrip_property(e):
    assert parse(to_text(e)) == e


class TestDifferentiate:
    def test_exponential_chain_rule(self):
        d = differentiate(parse("exp(b*s)"))
        # b * exp(b s) up to association
        for s in (-1.0, 0.0, 2.0):
            assert evaluate(d, s, {"b": 1.7}) == pytest.approx(
                1.7 * math.exp(1.7 * s), rel=1e-14
            )

    def test_arctan(self):
        d = differentiate(parse("arctan(s)"))
        for s in (-2.0, 0.0, 0.5, 3.0):
            assert evaluate(d, s) == pytest.approx(1.0 / (1.0 + s * s), rel=1e-14)

    def test_second_derivative_of_c_exp_ds(self):
        e = parse("c*exp(d*s)")
        d2 = differentiate(differentiate(e))
        pv = {"c": 0.8, "d": -1.3}
        for s in (-1.0, 0.0, 1.5):
            want = 0.8 * (-1.3) ** 2 * math.exp(-1.3 * s)
            assert evaluate(d2, s, pv) == pytest.approx(want, rel=1e-13)

    def test_total_on_grammar(self):
        for e in expression_corpus(seed=13, count=60):
            differentiate(differentiate(e))  # must never raise

    def test_derivative_matches_finite_differences(self):
        # 50-expression slice of the acceptance corpus, both orders
        for e, pvals, pts in derivative_corpus(seed=101, count=50):
            d1 = differentiate(e)
            d2 = differentiate(d1)
            for s in pts:
                sym = evaluate(d1, s, pvals)
                fd = (
                    evaluate(e, s + 1e-6, pvals) - evaluate(e, s - 1e-6, pvals)
                ) / 2e-6
                assert abs(sym - fd) <= 1e-6 * (1.0 + abs(sym))
                sym2 = evaluate(d2, s, pvals)
                h = 1e-4
                fd2 = (
                    evaluate(e, s + h, pvals)
                    - 2.0 * evaluate(e, s, pvals)
                    + evaluate(e, s - h, pvals)
                ) / h**2
                assert abs(sym2 - fd2) <= 1e-4 * (1.0 + abs(sym2))


class TestEvaluate:
    def test_exp_at_zero(self):
        assert evaluate(parse("exp(2*s)"), 0.0) == 1.0

    def test_pi_shift(self):
        assert evaluate(parse("pi/2 - arctan(s)"), 0.0) == pytest.approx(
            1.5707963, abs=1e-6
        )

    def test_negated_exponential(self):
        assert evaluate(parse("-exp(2*s)"), 1.0) == pytest.approx(
            -7.389056098930650, rel=1e-12
        )

    def test_ln_domain_error(self):
        with pytest.raises(EvalDomainError) as err:
            evaluate(parse("ln(s)"), -1.0)
        assert err.value.s == -1.0

    def test_division_by_zero(self):
        with pytest.raises(EvalDomainError):
            evaluate(parse("1/s"), 0.0)

    def test_missing_parameter(self):
        with pytest.raises(ParameterBindingError) as err:
            evaluate(parse("a*s + b"), 1.0, {"a": 1.0})
        assert err.value.names == ["b"]

    def test_overflow_is_ieee(self):
        assert evaluate(parse("exp(s)"), 1e4) == math.inf


class TestProgram:
    def test_compile_requires_bindings(self):
        with pytest.raises(ParameterBindingError):
            hexpr.compile_program(parse("a*s"))

    def test_program_matches_tree_walk(self, backend):
        import random

        rng = random.Random(5)
        for e in expression_corpus(seed=23, count=80):
            pvals = {name: rng.uniform(-2, 2) for name in parameters(e)}
            prog = hexpr.compile_program(e, pvals)
            for _ in range(20):
                s = rng.uniform(-3, 3)
                got = backend.eval_program(prog, s)
                try:
                    want = evaluate(e, s, pvals)
                except hexpr.ExprError:
                    # tree walk raises where the VM yields an IEEE special
                    assert not math.isfinite(got)
                    continue
                if math.isfinite(want):
                    assert got == pytest.approx(want, rel=1e-13, abs=1e-300)
                else:
                    assert got == want or math.isnan(got)
