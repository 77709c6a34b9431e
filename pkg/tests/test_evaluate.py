import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planwise.datasets import DECREASE, METRICS, NO_CHANGE
from planwise.evaluate import (
    BUCKET_MIDPOINTS,
    bucket_index,
    changes_count,
    evaluate_windows,
    ktest,
    overlap,
)
from planwise.planners import Action, Plan, PlannerBase

from conftest import make_dataset, make_project, make_record


class TestOverlap:
    def test_published_nine_metric_example(self):
        metrics = ["dit", "noc", "cbo", "rfc", "fout", "wmc", "nom", "loc", "lcom"]
        planner = dict(zip(metrics, [".", ".", ".", "+", ".", "+", "+", "+", "+"]))
        developer = dict(zip(metrics, [".", ".", "-", "+", "-", "+", "+", "+", "+"]))
        assert overlap(developer, planner) == pytest.approx(77.77, abs=0.01)

    def test_identical_vectors_give_full_overlap(self):
        vec = {m: "+" for m in METRICS}
        assert overlap(vec, dict(vec)) == 100.0

    def test_total_disagreement_gives_zero(self):
        d = {m: "+" for m in METRICS}
        p = {m: "-" for m in METRICS}
        assert overlap(d, p) == 0.0

    def test_different_universes_rejected(self):
        with pytest.raises(ValueError, match="universes"):
            overlap({"loc": "+"}, {"wmc": "+"})

    @given(
        st.lists(st.sampled_from("+-."), min_size=20, max_size=20),
        st.lists(st.sampled_from("+-."), min_size=20, max_size=20),
    )
    @settings(max_examples=100)
    def test_symmetric_bounded_and_discriminating(self, a, b):
        d = dict(zip(METRICS, a))
        p = dict(zip(METRICS, b))
        x = overlap(d, p)
        assert 0.0 <= x <= 100.0
        assert x == overlap(p, d)
        assert (x == 100.0) == (d == p)


class TestBuckets:
    def test_decile_edges(self):
        assert bucket_index(0.0) == 0
        assert bucket_index(9.99) == 0
        assert bucket_index(45.0) == 4
        assert bucket_index(80.0) == 8
        assert bucket_index(100.0) == 9

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            bucket_index(101.0)


class TestChangesCount:
    def test_no_change_plan_counts_zero(self):
        plan = Plan("c", {m: Action() for m in METRICS}, "test")
        assert changes_count(plan) == 0

    def test_five_action_plan(self):
        actions = {m: Action() for m in METRICS}
        for metric in ("rfc", "wmc", "loc", "lcom", "npm"):
            actions[metric] = Action(direction="+")
        assert changes_count(Plan("c", actions, "test")) == 5


class ReduceLocStub(PlannerBase):
    """Fixed plan: decrease loc, leave everything else alone."""

    name = "stub"

    def fit(self, train):
        return self

    def plan(self, record):
        actions = {m: Action() for m in METRICS}
        actions["loc"] = Action(direction=DECREASE, target_range=(0.0, 50.0))
        return Plan(record.class_name, actions, self.name)


def hand_project():
    """Three releases, five classes, every overlap and delta set by hand.

    Against the stub planner (loc down, rest unchanged), the middle-release
    classes land at overlaps 100, 55, 80, 45; C5 disappears before the
    validation release and C6 appears in it, so both are excluded.
    """
    changed = {
        0: (),
        4: ("wmc", "dit", "noc", "cbo"),
        9: ("wmc", "dit", "noc", "cbo", "rfc", "lcom", "ca", "ce", "npm"),
        10: ("wmc", "dit", "noc", "cbo", "rfc", "lcom", "ca", "ce", "npm", "lcom3"),
    }
    v1 = make_dataset(
        [make_record("C1", defects=1, loc=90.0), make_record("C2", loc=90.0)],
        version="1",
        order=0,
    )
    v2 = make_dataset(
        [
            make_record("C1", defects=4, loc=100.0),
            make_record("C2", defects=2, loc=100.0),
            make_record("C3", defects=6, loc=100.0),
            make_record("C4", defects=1, loc=100.0),
            make_record("C5", defects=9, loc=100.0),
        ],
        version="2",
        order=1,
    )
    v3 = make_dataset(
        [
            # C1: only loc moved; overlap 20/20 = 100; delta +3 reduced.
            make_record("C1", defects=1, loc=80.0),
            # C2: loc down plus 9 metrics up; overlap 11/20 = 55; delta -3.
            make_record(
                "C2", defects=5, loc=80.0, **{m: 2.0 for m in changed[9]}
            ),
            # C3: loc down plus 4 metrics up; overlap 16/20 = 80; delta +4.
            make_record(
                "C3", defects=2, loc=80.0, **{m: 2.0 for m in changed[4]}
            ),
            # C4: loc untouched, 10 metrics up; overlap 9/20 = 45; delta 0.
            make_record(
                "C4", defects=1, loc=100.0, **{m: 2.0 for m in changed[10]}
            ),
            # C6 is new and therefore excluded from matching.
            make_record("C6", defects=7, loc=10.0),
        ],
        version="3",
        order=2,
    )
    return make_project([v1, v2, v3], name="hand")


# Frozen hand table. Matched classes C1..C4 carry 13 defects in release 2.
# Reduced curve: 4 at midpoint 85, 3 at 95. The 10-point uniform grid takes
# four Simpson panels and one trapezoid tail:
#   reduced area = (10/3)*(0 + 4*0 + 4) + 10*(4+3)/2 = 145/3
#   increased area = (10/3)*(0 + 4*3 + 0) = 40
# AUPEC normalizes by 13 defects * 90 span:
#   reduced  = 100 * (145/3) / 1170 = 4.131054131054131
#   increased = 100 * 40 / 1170 = 3.4188034188034188
EXPECTED_REDUCED = (0, 0, 0, 0, 0, 0, 0, 0, 4, 3)
EXPECTED_INCREASED = (0, 0, 0, 0, 0, 3, 0, 0, 0, 0)
EXPECTED_CLASSES = (0, 0, 0, 0, 1, 1, 0, 0, 1, 1)
EXPECTED_AUPEC_REDUCED = 4.131054131054131
EXPECTED_AUPEC_INCREASED = 3.4188034188034188


class TestKTest:
    def test_hand_computed_curve_and_areas(self):
        result = ktest(hand_project(), 0, 1, 2, ReduceLocStub())
        assert result.matched_classes == 4
        assert result.matched_defects == 13
        assert tuple(p.overlap_bucket for p in result.curve) == BUCKET_MIDPOINTS
        assert tuple(p.defects_reduced for p in result.curve) == EXPECTED_REDUCED
        assert tuple(p.defects_increased for p in result.curve) == EXPECTED_INCREASED
        assert tuple(p.classes for p in result.curve) == EXPECTED_CLASSES
        assert result.aupec_reduced == pytest.approx(
            EXPECTED_AUPEC_REDUCED, abs=1e-9
        )
        assert result.aupec_increased == pytest.approx(
            EXPECTED_AUPEC_INCREASED, abs=1e-9
        )
        assert result.changes_per_plan.median == 1.0
        assert result.changes_per_plan.plans == 5

    def test_rerun_is_identical(self):
        assert ktest(hand_project(), 0, 1, 2, ReduceLocStub()) == ktest(
            hand_project(), 0, 1, 2, ReduceLocStub()
        )

    def test_no_shared_classes_yields_absent_areas(self):
        project = hand_project()
        v3 = make_dataset(
            [make_record("Z1", defects=2)], version="3", order=2
        )
        renamed = make_project([project.versions[0], project.versions[1], v3])
        result = ktest(renamed, 0, 1, 2, ReduceLocStub())
        assert result.curve == ()
        assert result.aupec_reduced is None
        assert result.aupec_increased is None
        assert result.matched_classes == 0

    def test_scaling_defects_scales_curve_but_not_aupec(self):
        base = ktest(hand_project(), 0, 1, 2, ReduceLocStub())

        def scaled(ds, factor=3):
            recs = [
                type(r)(r.class_name, r.metrics, r.defects * factor)
                for r in ds.records
            ]
            return make_dataset(recs, version=ds.version, order=ds.released_order)

        project = hand_project()
        tripled = make_project([scaled(v) for v in project.versions])
        result = ktest(tripled, 0, 1, 2, ReduceLocStub())
        assert tuple(p.defects_reduced for p in result.curve) == tuple(
            3 * h for h in EXPECTED_REDUCED
        )
        assert result.aupec_reduced == pytest.approx(base.aupec_reduced)
        assert result.aupec_increased == pytest.approx(base.aupec_increased)

    def test_window_indices_must_be_ordered(self):
        with pytest.raises(ValueError):
            ktest(hand_project(), 1, 0, 2, ReduceLocStub())
        with pytest.raises(ValueError):
            ktest(hand_project(), 0, 1, 5, ReduceLocStub())

    def test_result_serializes(self):
        doc = ktest(hand_project(), 0, 1, 2, ReduceLocStub()).to_dict()
        assert doc["versions"] == {"train": "1", "test": "2", "validation": "3"}
        assert len(doc["curve"]) == 10
        csv_text = ktest(hand_project(), 0, 1, 2, ReduceLocStub()).curve_csv()
        assert csv_text.splitlines()[0] == "bucket,reduced,increased,classes"
        assert len(csv_text.splitlines()) == 11


class TestWindows:
    def test_five_releases_make_three_windows(self):
        versions = [
            make_dataset(
                [make_record("C1", defects=i, loc=50.0 + i)],
                version=str(i + 1),
                order=i,
            )
            for i in range(5)
        ]
        project = make_project(versions, name="five")
        results = evaluate_windows(project, ReduceLocStub())
        assert len(results) == 3
        assert [(r.version_i, r.version_j, r.version_k) for r in results] == [
            ("1", "2", "3"),
            ("2", "3", "4"),
            ("3", "4", "5"),
        ]

    def test_too_few_releases_explains_the_requirement(self):
        project = make_project(
            [
                make_dataset([make_record("C1")], version="1", order=0),
                make_dataset([make_record("C1")], version="2", order=1),
            ]
        )
        with pytest.raises(ValueError, match="at least 3"):
            evaluate_windows(project, ReduceLocStub())
