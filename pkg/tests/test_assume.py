import pytest

from ctxsat.assume import assume_encode, nested_conditional_program
from ctxsat.corpus import corpus_source
from ctxsat.dsl import parse_program, run_source
from ctxsat.errors import UnsupportedCorpus


def test_layered_never_larger_on_conditional_corpora():
    for name in ("intro", "conditional"):
        cmp = assume_encode(parse_program(corpus_source(name)))
        assert cmp.layered_nodes <= cmp.assume_nodes
        assert cmp.iterations >= 1


def test_counts_equal_without_conditionals():
    src = """
    (function f 1)
    (function a 0)
    (function b 0)
    (rule fold (f ?x) ?x :scope everywhere)
    (term (f (f a)))
    (term b)
    (run 4)
    """
    cmp = assume_encode(parse_program(src))
    assert cmp.assume_nodes == cmp.layered_nodes


def test_nested_series_grows_strictly():
    ratios = []
    for k in (1, 2, 3):
        cmp = assume_encode(
            parse_program(corpus_source(f"nested-conditional-{k}"))
        )
        assert cmp.layered_nodes <= cmp.assume_nodes
        ratios.append(cmp.assume_nodes / cmp.layered_nodes)
    assert ratios[0] < ratios[1] < ratios[2]


def test_lambda_corpus_unsupported():
    with pytest.raises(UnsupportedCorpus):
        assume_encode(parse_program(corpus_source("lambda")))


def test_context_scoped_rules_unsupported():
    with pytest.raises(UnsupportedCorpus):
        assume_encode(parse_program(corpus_source("queryplan")))


def test_reserved_symbol_names_rejected():
    with pytest.raises(UnsupportedCorpus):
        assume_encode(parse_program("(function assume-true 2)"))


def test_generator_matches_shipped_corpora():
    for k in (1, 2, 3):
        assert nested_conditional_program(k) == corpus_source(
            f"nested-conditional-{k}"
        )


def test_generated_programs_resolve_at_bottom():
    for k in (1, 2, 3):
        out = run_source(nested_conditional_program(k))
        assert out.ok
        assert out.reports[-1].saturated


def test_generator_rejects_bad_depth():
    with pytest.raises(ValueError):
        nested_conditional_program(0)
