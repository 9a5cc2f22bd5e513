import pytest

from math import prod

from jacobsthal.arith import first_primes, primorial
from jacobsthal.cover import (CoverAssignment, HSOURCE_COMPUTED, KnownHTable,
                              STRATEGIES, SearchBudget, ComputePolicy,
                              coverable, default_h_table,
                              elementary_lower_witness, h_of, least_witness,
                              load_h_table, max_cover_length, save_h_table,
                              verify_cover, witness_integer, _parse_h_table)
from jacobsthal.errors import (BudgetExceeded, TableParseError,
                               TableValidationError, Unavailable)
from jacobsthal.gaps import g_exhaustive

REMARK_ROWS = [(5, 14), (10, 46), (15, 100), (20, 174), (25, 258), (30, 330),
               (35, 432), (40, 538), (45, 642), (50, 762), (54, 858)]


def test_coverable_trivial_and_validation():
    empty = coverable(0, (2, 3))
    assert empty.length == 0 and empty.is_valid()
    one = coverable(1, (7,))
    assert one is not None and one.is_valid()
    with pytest.raises(ValueError):
        coverable(3, ())
    with pytest.raises(ValueError):
        coverable(3, (2, 2, 3))
    with pytest.raises(ValueError):
        coverable(3, (2, 9))
    with pytest.raises(ValueError):
        coverable(-1, (2,))


def test_coverable_small_decisions():
    # {2,3} covers three consecutive integers but never four
    assert coverable(3, (2, 3)) is not None
    assert coverable(4, (2, 3)) is None
    # a single prime covers only length 1
    assert coverable(2, (13,)) is None


def test_strategies_agree_at_critical_lengths():
    critical = {1: 1, 2: 3, 3: 5, 4: 9, 5: 13, 6: 21, 7: 25, 8: 33}
    for k, lstar in critical.items():
        ps = first_primes(k)
        for length, feasible in ((lstar, True), (lstar + 1, False)):
            for strategy in STRATEGIES:
                found = coverable(length, ps, strategy=strategy)
                assert (found is not None) == feasible, (k, length, strategy)
                if found is not None:
                    assert found.is_valid()


def test_max_cover_length_matches_direct_scan_oracle():
    for k in range(1, 8):
        length, assignment = max_cover_length(first_primes(k))
        assert length + 1 == g_exhaustive(primorial(k)), k
        assert assignment.is_valid()
        assert assignment.length == length


def test_max_cover_length_non_prefix_sets():
    length, assignment = max_cover_length((3, 5))
    assert length == 2
    assert assignment.is_valid()
    length, _ = max_cover_length((2,))
    assert length == 1


def test_remark_values_for_small_k():
    length, _ = max_cover_length(first_primes(5))
    assert length + 1 == 14
    length, _ = max_cover_length(first_primes(10))
    assert length + 1 == 46


def test_budget_is_an_error_not_a_verdict():
    with pytest.raises(BudgetExceeded):
        coverable(45, first_primes(10), budget=SearchBudget(max_nodes=2))
    with pytest.raises(BudgetExceeded):
        coverable(46, first_primes(10),
                  budget=SearchBudget(max_seconds=1e-9))


def test_witness_integer_least_positive():
    # the canonical length-13 cover by the first five primes
    assignment = CoverAssignment((2, 3, 5, 7, 11), (0, 0, 1, 5, 7), 13)
    assert assignment.is_valid()
    witness = witness_integer(assignment)
    assert witness.start == 114
    assert verify_cover(114, 13, (2, 3, 5, 7, 11))
    # all-zero offsets must give the modulus, not zero
    bump = witness_integer(CoverAssignment((2, 3), (0, 0), 1))
    assert bump.start == 6


def test_least_witness_pinned_and_bounds():
    witness = least_witness(13, first_primes(5))
    assert (witness.start, witness.length) == (114, 13)
    assert least_witness(3, (2, 3)).start == 2
    assert least_witness(14, first_primes(5)) is None  # no such run exists
    assert least_witness(45, first_primes(10)) is None  # period too large


def test_verify_cover():
    assert verify_cover(2, 3, (2, 3))  # 2, 3, 4
    assert not verify_cover(2, 4, (2, 3))  # 5 is coprime to 6
    assert verify_cover(90, 0, (2, 3))  # empty run


def test_elementary_lower_witness():
    pinned = {3: (2, 5), 4: (2, 9), 5: (114, 13)}
    for n, (start, length) in pinned.items():
        witness = elementary_lower_witness(n)
        assert (witness.start, witness.length) == (start, length)
    for n in range(3, 21):
        witness = elementary_lower_witness(n)
        ps = first_primes(n)
        assert witness.length == 2 * ps[-2] - 1
        assert verify_cover(witness.start, witness.length, ps)
    with pytest.raises(ValueError):
        elementary_lower_witness(2)


def test_cover_assignment_helpers():
    assignment = CoverAssignment((2, 3), (0, 2), 4)
    assert assignment.offset_of(3) == 2
    assert assignment.offset_map() == {2: 0, 3: 2}
    assert assignment.covers(2)
    assert not assignment.covers(1)
    assert not assignment.is_valid()  # position 1 is uncovered


# --- the known-h table -------------------------------------------------------

def test_default_table_ships_the_known_rows():
    # a fresh load, not the shared fixture: other tests may legitimately
    # have cached computed entries into that instance
    table = default_h_table()
    assert table.rows() == [(k, h, "paper") for k, h in REMARK_ROWS]


def test_parse_accepts_comments_and_blank_lines():
    table = _parse_h_table([
        "# heading", "", "  5 , 14 , paper", "3,6,computed",
        "7,26,ingested",
    ])
    assert table.rows() == [(3, 6, "computed"), (5, 14, "paper"),
                            (7, 26, "ingested")]


@pytest.mark.parametrize("line, fragment", [
    ("5,14", "expected 'k,h,source'"),
    ("5,fourteen,paper", "must be integers"),
    ("5,14,guessed", "unknown source"),
])
def test_parse_errors_carry_line_numbers(line, fragment):
    with pytest.raises(TableParseError) as err:
        _parse_h_table(["# comment", line])
    assert "line 2" in str(err.value)
    assert fragment in str(err.value)


def test_parse_rejects_duplicate_k():
    with pytest.raises(TableParseError) as err:
        _parse_h_table(["5,14,paper", "5,14,paper"])
    assert "duplicate" in str(err.value)


def test_validation_rejects_impossible_h():
    with pytest.raises(TableValidationError):
        _parse_h_table(["5,10,paper"])  # h(5) >= 2*p_4 = 14
    table = KnownHTable()
    with pytest.raises(TableValidationError):
        table.set(0, 5, "paper")
    with pytest.raises(TableValidationError):
        table.set(1, 1, "paper")
    with pytest.raises(TableValidationError):
        table.set(5, 14, "folklore")


def test_save_load_round_trip(tmp_path, shipped_table):
    path = tmp_path / "h.txt"
    save_h_table(shipped_table, path)
    assert load_h_table(path).rows() == shipped_table.rows()


def test_h_of_sources_and_caching():
    table = KnownHTable()
    h, source = h_of(3, table)
    assert (h, source) == (6, HSOURCE_COMPUTED)
    entry = table.get(3)
    assert entry.witness is not None
    assert verify_cover(entry.witness.start, entry.witness.length,
                        first_primes(3))
    # second call hits the table
    assert h_of(3, table) == (6, HSOURCE_COMPUTED)


def test_h_of_tabulated_and_refusals(shipped_table):
    assert h_of(5, shipped_table) == (14, "paper")
    with pytest.raises(Unavailable):
        h_of(4, KnownHTable(), ComputePolicy(allow_compute=False))
    with pytest.raises(Unavailable):
        h_of(13, KnownHTable(), ComputePolicy(max_compute_k=12))
    with pytest.raises(ValueError):
        h_of(0, shipped_table)


def test_h_of_budget_propagates():
    policy = ComputePolicy(budget=SearchBudget(max_nodes=2))
    with pytest.raises(BudgetExceeded):
        h_of(10, KnownHTable(), policy)
