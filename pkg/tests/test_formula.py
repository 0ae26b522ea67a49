import pytest

from mathsearch.formula import (
    CONST,
    UNIF,
    EmptyFormula,
    Id,
    Num,
    Op,
    ParseError,
    UnsupportedElement,
    Var,
    parse_infix,
    parse_mathml,
    parse_token,
    render,
    serialize,
)

from conftest import random_any_tree, random_parser_tree


def test_parse_mathml_flat_sum():
    tree = parse_mathml("<math><mi>a</mi><mo>+</mo><mi>b</mi></math>")
    assert tree == Op("+", (Var("a"), Var("b")))


def test_parse_mathml_msup():
    tree = parse_mathml("<math><msup><mi>b</mi><mi>a</mi></msup></math>")
    assert tree == Op("^", (Var("b"), Var("a")))


def test_parse_mathml_layout_elements():
    assert parse_mathml("<math><mfrac><mi>x</mi><mi>y</mi></mfrac></math>") == Op(
        "/", (Var("x"), Var("y"))
    )
    assert parse_mathml("<math><msqrt><mi>b</mi></msqrt></math>") == Op("sqrt", (Var("b"),))
    assert parse_mathml("<math><mroot><mi>a</mi><mn>3</mn></mroot></math>") == Op(
        "root", (Var("a"), Num("3"))
    )
    assert parse_mathml("<math><msub><mi>x</mi><mn>1</mn></msub></math>") == Op(
        "_", (Var("x"), Num("1"))
    )


def _shunting_yard(items):
    """Independent grouping oracle for flat operand/operator runs."""
    prec = {"=": 1, "<": 1, ">": 1, "+": 2, "-": 2, "*": 3, "/": 3, "^": 4}
    out, ops = [], []

    def reduce(symbol):
        b, a = out.pop(), out.pop()
        out.append(Op(symbol, (a, b)))

    for item in items:
        if isinstance(item, str):
            while ops and (prec[ops[-1]] > prec[item] or (prec[ops[-1]] == prec[item] and item != "^")):
                reduce(ops.pop())
            ops.append(item)
        else:
            out.append(item)
    while ops:
        reduce(ops.pop())
    (tree,) = out
    return tree


def test_parse_mathml_precedence_example():
    # a + b . c must group the product first
    xml = "<math><mi>a</mi><mo>+</mo><mi>b</mi><mo>&#x22C5;</mo><mi>c</mi></math>"
    expected = _shunting_yard([Var("a"), "+", Var("b"), "*", Var("c")])
    assert expected == Op("+", (Var("a"), Op("*", (Var("b"), Var("c")))))
    assert parse_mathml(xml) == expected


def test_parse_mathml_vs_shunting_yard_oracle(rng):
    operators = ["+", "-", "*", "/", "="]
    for _ in range(300):
        n_operands = rng.randint(1, 8)
        items, xml = [], ["<math>"]
        for j in range(n_operands):
            if j:
                op = rng.choice(operators)
                items.append(op)
                xml.append(f"<mo>{op}</mo>")
            if rng.random() < 0.5:
                name = rng.choice("abcxyz")
                items.append(Var(name))
                xml.append(f"<mi>{name}</mi>")
            else:
                lit = str(rng.randint(0, 99))
                items.append(Num(lit))
                xml.append(f"<mn>{lit}</mn>")
        xml.append("</math>")
        assert parse_mathml("".join(xml)) == _shunting_yard(items)


def test_parse_mathml_implicit_multiplication():
    xml = "<math><mn>3</mn><msup><mi>x</mi><mn>2</mn></msup></math>"
    assert parse_mathml(xml) == Op("*", (Num("3"), Op("^", (Var("x"), Num("2")))))


def test_parse_mathml_unary_minus_folds_into_literal():
    assert parse_mathml("<math><mo>-</mo><mn>3</mn></math>") == Num("-3")
    assert parse_mathml("<math><mo>-</mo><mi>x</mi></math>") == Op("neg", (Var("x"),))


def test_parse_mathml_nested_mrow_unwraps():
    xml = "<math><mrow><mi>a</mi><mo>+</mo><mrow><mi>b</mi></mrow></mrow></math>"
    assert parse_mathml(xml) == Op("+", (Var("a"), Var("b")))


def test_parse_mathml_errors():
    with pytest.raises(ParseError) as exc_info:
        parse_mathml("<math><mi>a</mi>")
    assert exc_info.value.position is not None
    with pytest.raises(UnsupportedElement) as unsupported:
        parse_mathml("<math><mtext>hi</mtext></math>")
    assert unsupported.value.tag == "mtext"
    with pytest.raises(EmptyFormula):
        parse_mathml("<math></math>")
    with pytest.raises(ParseError):
        parse_mathml("<math><mi>a</mi><mo>+</mo></math>")
    with pytest.raises(ParseError):
        parse_mathml("<math><mn>x3</mn></math>")


def test_parse_infix_examples():
    assert parse_infix("a+b^a") == Op("+", (Var("a"), Op("^", (Var("b"), Var("a")))))
    assert parse_infix("3*x^2-2*x+2") == Op(
        "+",
        (
            Op(
                "-",
                (
                    Op("*", (Num("3"), Op("^", (Var("x"), Num("2"))))),
                    Op("*", (Num("2"), Var("x"))),
                ),
            ),
            Num("2"),
        ),
    )
    assert parse_infix("a") == Var("a")


def test_parse_infix_grammar_details():
    assert parse_infix("a^b^c") == Op("^", (Var("a"), Op("^", (Var("b"), Var("c")))))
    assert parse_infix("a-b-c") == Op("-", (Op("-", (Var("a"), Var("b"))), Var("c")))
    assert parse_infix("sqrt(x+1)") == Op("sqrt", (Op("+", (Var("x"), Num("1"))),))
    assert parse_infix("(a+b)*c") == Op("*", (Op("+", (Var("a"), Var("b"))), Var("c")))
    assert parse_infix("x=y") == Op("=", (Var("x"), Var("y")))
    assert parse_infix("-3") == Num("-3")
    assert parse_infix("-x") == Op("neg", (Var("x"),))
    assert parse_infix("-3^2") == Op("neg", (Op("^", (Num("3"), Num("2"))),))


def test_parse_infix_errors_carry_byte_offsets():
    with pytest.raises(EmptyFormula):
        parse_infix("   ")
    with pytest.raises(ParseError) as trailing:
        parse_infix("a+")
    assert trailing.value.position == 2
    with pytest.raises(ParseError) as unclosed:
        parse_infix("(a+b")
    assert unclosed.value.position == 4
    with pytest.raises(ParseError) as bad_char:
        parse_infix("a+#b")
    assert bad_char.value.position == 2
    with pytest.raises(ParseError):
        parse_infix("sqrt(a,b)")


def test_serialize_examples():
    assert serialize(Op("+", (Var("a"), Var("b")))) == "(+ (v a) (v b))"
    assert serialize(Op("^", (Id(2), Id(1)))) == "(^ (i 2) (i 1))"
    assert serialize(Op("/", (UNIF, UNIF))) == "(/ (u) (u))"
    assert serialize(CONST) == "(c)"
    assert serialize(Num("3.14")) == "(n 3.14)"


def test_serialize_injective_on_random_pairs(rng):
    trees = [random_any_tree(rng) for _ in range(400)]
    for i, a in enumerate(trees):
        for b in trees[i + 1 :]:
            if a != b:
                assert serialize(a) != serialize(b)


def test_parse_token_inverts_serialize(rng):
    for _ in range(500):
        tree = random_any_tree(rng)
        assert parse_token(serialize(tree)) == tree
    with pytest.raises(ParseError):
        parse_token("(v a) junk")
    with pytest.raises(ParseError):
        parse_token("(+ (v a)")


def test_render_round_trip_on_random_trees(rng):
    for _ in range(1000):
        tree = random_parser_tree(rng)
        rendered = render(tree)
        assert parse_infix(rendered) == tree, rendered


def test_render_examples():
    assert render(parse_infix("a+b^a")) == "a+b^a"
    assert render(Op("neg", (Num("3"),))) == "-(3)"
    assert render(Op("^", (Num("-3"), Var("x")))) == "(-3)^x"
    assert render(Op("*", (Op("+", (Var("a"), Var("b"))), Var("c")))) == "(a+b)*c"


def test_parsers_agree_on_equivalent_inputs():
    pairs = [
        ("a+b*c", "<math><mi>a</mi><mo>+</mo><mi>b</mi><mo>*</mo><mi>c</mi></math>"),
        ("b^a", "<math><msup><mi>b</mi><mi>a</mi></msup></math>"),
        ("x/y+1", "<math><mfrac><mi>x</mi><mi>y</mi></mfrac><mo>+</mo><mn>1</mn></math>"),
        (
            "a^2+sqrt(b)/c",
            "<math><msup><mi>a</mi><mn>2</mn></msup><mo>+</mo>"
            "<mfrac><msqrt><mi>b</mi></msqrt><mi>c</mi></mfrac></math>",
        ),
    ]
    for infix, xml in pairs:
        assert parse_infix(infix) == parse_mathml(xml)


def test_tree_invariants_enforced():
    with pytest.raises(ValueError):
        Var("")
    with pytest.raises(ValueError):
        Num("1.2.3")
    with pytest.raises(ValueError):
        Id(0)
    with pytest.raises(ValueError):
        Op("+", ())
