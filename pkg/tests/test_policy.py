import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ebmatch.errors import ArrivalNotInF, NotClassAdmissible
from ebmatch.policy import (
    CLASS_ADMISSIBLE,
    KINDS,
    Policy,
    arrival_row_choices,
    choose_position,
    select_class,
    step_buffer,
    step_class,
)
from .conftest import arr
from ebmatch.state import (
    BufferDetail,
    EMPTY_BUFFER,
    class_detail_of,
    ArrivalQuadruple,
    validate_buffer,
)


class TestSelectClass:
    def test_rand_takes_first_loaded(self):
        assert select_class("rand", {1: 0, 2: 1, 3: 4}, (1, 3, 2)) == 3

    def test_ml_takes_longest(self):
        assert select_class("ml", {1: 2, 2: 5, 3: 4}, (1, 2, 3)) == 2

    def test_ms_takes_shortest(self):
        assert select_class("ms", {1: 2, 2: 5, 3: 4}, (1, 2, 3)) == 1

    def test_row_breaks_ties(self):
        assert select_class("ml", {1: 3, 2: 3}, (2, 1)) == 2
        assert select_class("ml", {1: 3, 2: 3}, (1, 2)) == 1

    def test_none_when_all_empty(self):
        assert select_class("rand", {1: 0, 2: 0}, (1, 2)) is None

    def test_order_driven_has_no_selector(self):
        with pytest.raises(NotClassAdmissible):
            select_class("fcfs", {1: 1}, (1,))


class TestChoosePosition:
    def test_fcfs_oldest_compatible(self, chain_bm):
        # server word scanned by customer 2, compatible with servers 2, 3
        word = (1, 3, 2, 3)
        assert choose_position(chain_bm, Policy("fcfs"), word, "c", 2) == 1

    def test_lcfs_newest_compatible(self, chain_bm):
        word = (1, 3, 2, 3)
        assert choose_position(chain_bm, Policy("lcfs"), word, "c", 2) == 3

    def test_class_driven_takes_oldest_of_class(self, chain_bm):
        # ml scanned by customer 2: class 3 appears twice, class 2 once,
        # so the oldest class-3 item is taken.
        word = (3, 2, 3)
        assert (
            choose_position(chain_bm, Policy("ml"), word, "c", 2, pref_row=(2, 3))
            == 0
        )

    def test_none_when_no_compatible(self, chain_bm):
        assert choose_position(chain_bm, Policy("fcfs"), (1,), "c", 3) is None


class TestStepBuffer:
    def test_both_match_in_buffer(self, chain_bm):
        # customer 1 takes server 1, server 3 takes customer 2
        buf = BufferDetail(w=(2,), z=(1,))
        out = step_buffer(chain_bm, Policy("fcfs"), buf, arr(1, 3))
        assert out == EMPTY_BUFFER

    def test_lone_customer_match(self, chain_bm):
        buf = BufferDetail(w=(), z=(2,))
        out = step_buffer(chain_bm, Policy("fcfs"), buf, arr(1, 1))
        assert out == BufferDetail(w=(), z=(1,))

    def test_compatible_couple_matches_itself(self, chain_bm):
        out = step_buffer(chain_bm, Policy("fcfs"), EMPTY_BUFFER, arr(1, 1))
        assert out == EMPTY_BUFFER

    def test_incompatible_couple_enters(self, chain_bm):
        out = step_buffer(chain_bm, Policy("fcfs"), EMPTY_BUFFER, arr(3, 1))
        assert out == BufferDetail(w=(3,), z=(1,))

    def test_arrival_graph_enforced(self, restricted):
        with pytest.raises(ArrivalNotInF):
            step_buffer(restricted, Policy("fcfs"), EMPTY_BUFFER, arr(1, 1))

    def test_imbalance_preserved(self, chain_bm):
        buf = BufferDetail(w=(3, 3), z=(1,))
        for kind in ("fcfs", "lcfs"):
            out = step_buffer(chain_bm, Policy(kind), buf, arr(2, 1))
            assert len(out.w) - len(out.z) == 1


class TestProjection:
    """Class-driven disciplines act the same on buffers and class counts."""

    @settings(max_examples=200, deadline=None)
    @given(
        kind=st.sampled_from(CLASS_ADMISSIBLE),
        seeds=st.lists(
            st.tuples(st.integers(1, 3), st.integers(1, 3)), max_size=6
        ),
        data=st.data(),
    )
    def test_step_commutes_with_class_projection(self, chain_bm, kind, seeds, data):
        policy = Policy(kind)
        buf = EMPTY_BUFFER
        for c, s in seeds:
            rows = data.draw(
                st.sampled_from(list(arrival_row_choices(chain_bm, policy, c, s)))
            )
            arrival = arr(c, s, sigma_row=rows[0], gamma_row=rows[1])
            stepped_detail = step_class(
                chain_bm, policy, class_detail_of(chain_bm, buf), arrival
            )
            buf = step_buffer(chain_bm, policy, buf, arrival)
            assert class_detail_of(chain_bm, buf) == stepped_detail
            # the buffer never holds a compatible customer/server pair
            validate_buffer(chain_bm, buf.w, buf.z)

    def test_order_driven_rejects_class_step(self, chain_bm):
        with pytest.raises(NotClassAdmissible):
            step_class(
                chain_bm,
                Policy("fcfs"),
                class_detail_of(chain_bm, EMPTY_BUFFER),
                arr(1, 1),
            )


class TestRowChoices:
    def test_order_driven_single_dummy(self, chain_bm):
        assert arrival_row_choices(chain_bm, Policy("fcfs"), 1, 2) == ((None, None),)

    def test_class_driven_product_of_permutations(self, chain_bm):
        # customer 1 has two compatible servers, server 2 two customers
        choices = list(arrival_row_choices(chain_bm, Policy("ml"), 1, 2))
        assert len(choices) == 4

    def test_all_kinds_valid(self):
        assert set(CLASS_ADMISSIBLE) <= set(KINDS)
        with pytest.raises(Exception):
            Policy("priority")
