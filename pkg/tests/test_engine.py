import pytest

from ebmatch.engine import match_words, run, run_final, unmatched_words
from ebmatch.errors import ArrivalNotInF, NotAdmissibleInput
from ebmatch.policy import Policy
from ebmatch.state import ArrivalQuadruple, BufferDetail, EMPTY_BUFFER

from .conftest import STRONG_C, STRONG_S, arr


class TestRun:
    def test_trace_bookkeeping(self, chain_bm, fcfs):
        arrivals = [arr(1, 1), arr(3, 1), arr(2, 3)]
        trace = run(chain_bm, fcfs, arrivals)
        assert trace.n_customer_arrivals == 3
        assert trace.n_server_arrivals == 3
        assert len(trace.steps) == 3

    def test_perfect_trace(self, chain_bm, fcfs):
        # (3,1) parks both; then customer 1 takes the buffered server 1
        # while server 3 takes the buffered customer 3
        arrivals = [arr(3, 1), arr(1, 3)]
        trace = run(chain_bm, fcfs, arrivals)
        assert trace.final_buffer.is_empty
        assert trace.is_perfect
        assert len(trace.matches) == 2

    def test_arrival_check(self, restricted, fcfs):
        with pytest.raises(ArrivalNotInF):
            run(restricted, fcfs, [arr(1, 1)])


class TestMatchWords:
    def test_equal_length_pairs(self, chain_bm, fcfs):
        trace = match_words(chain_bm, fcfs, (1, 2), (1, 2))
        assert trace.final_buffer.is_empty

    def test_surplus_prefix_enters_alone(self, chain_bm, fcfs):
        # three customers, one server: the first two customers arrive
        # unaccompanied
        trace = match_words(chain_bm, fcfs, (3, 3, 1), (1,))
        assert trace.n_customer_arrivals == 3
        assert trace.n_server_arrivals == 1
        # the trailing couple (1, s1) is compatible and matches itself
        assert trace.final_buffer == BufferDetail(w=(3, 3), z=())


class TestRunFinal:
    def test_matches_stepwise_fold(self, restricted, fcfs):
        pairs = [(1, 2), (2, 1), (3, 2), (2, 3)]
        final = run_final(restricted, fcfs, pairs)
        trace = run(restricted, fcfs, [arr(c, s) for c, s in pairs])
        assert final == trace.final_buffer

    def test_initial_buffer_respected(self, restricted, fcfs):
        initial = BufferDetail(w=(3,), z=(1,))
        final = run_final(restricted, fcfs, [(2, 3)], initial=initial)
        # customer 2 takes server... no compatible server buffered for 2;
        # server 3 takes buffered customer 3; customer 2 enters.
        assert final == BufferDetail(w=(2,), z=(1,))

    def test_lone_arrivals(self, chain_bm, fcfs):
        final = run_final(chain_bm, fcfs, [(3, 0), (0, 3)], check_arrivals=False)
        assert final.is_empty


class TestUnmatchedWords:
    def test_strong_couple_matches_perfectly(self, restricted, fcfs):
        left = unmatched_words(
            restricted, fcfs, STRONG_C, STRONG_S, check_arrivals=False
        )
        assert left.is_empty

    def test_unbalanced_rejected(self, chain_bm, fcfs):
        with pytest.raises(NotAdmissibleInput):
            unmatched_words(chain_bm, fcfs, (3, 3, 3), (3,), check_arrivals=False)

    def test_agrees_with_traced_engine(self, chain_bm, lcfs):
        trace = match_words(chain_bm, lcfs, (1, 1, 2), (2, 2, 1))
        left = unmatched_words(chain_bm, lcfs, (1, 1, 2), (2, 2, 1))
        assert left == trace.final_buffer
