import pytest

from planwise.bellwether import (
    belltree_plan,
    discover,
    g_score,
    make_belltree_planner,
    validate,
)
from planwise.datasets import Community, Project, pool_versions
from planwise.evaluate import ChangesSummary, CurvePoint, KTestResult
from planwise.planners import XTreePlanner

from conftest import make_dataset, make_record, planted_community


class TestGScore:
    def test_perfect_prediction(self):
        assert g_score(tp=5, fp=0, tn=5, fn=0) == 1.0

    def test_nothing_found(self):
        assert g_score(tp=0, fp=0, tn=5, fn=5) == 0.0

    def test_half_recall_no_alarms(self):
        assert g_score(tp=5, fp=0, tn=5, fn=5) == pytest.approx(2.0 / 3.0)


class TestDiscover:
    def test_two_projects_pick_the_higher_cross_score(self):
        community = planted_community(seed=1)
        two = Community(community.projects[:1] + community.projects[2:])
        report = discover(two)
        assert set(report.community) == {"alpha", "exemplar"}
        assert report.bellwether == "exemplar"
        assert (
            report.per_source_median["exemplar"]
            > report.per_source_median["alpha"]
        )

    def test_union_distribution_project_is_the_exemplar(self):
        report = discover(planted_community(seed=7))
        assert report.bellwether == "exemplar"
        assert report.scores["exemplar"]["alpha"] > report.scores["alpha"]["beta"]

    def test_project_order_does_not_matter(self):
        community = planted_community(seed=3)
        reversed_community = Community(tuple(reversed(community.projects)))
        a = discover(community)
        b = discover(reversed_community)
        assert a.bellwether == b.bellwether
        assert a.per_source_median == b.per_source_median

    def test_single_label_target_excluded_from_medians(self):
        community = planted_community(seed=5)
        clean = Project(
            "allclean",
            (make_dataset([make_record(f"z{i}") for i in range(30)], project="allclean"),),
        )
        extended = Community(community.projects + (clean,))
        report = discover(extended)
        assert report.scores["exemplar"]["allclean"] is None
        assert report.bellwether == "exemplar"

    def test_removing_the_bellwether_still_returns_a_project(self):
        community = planted_community(seed=9)
        remaining = Community(
            tuple(p for p in community.projects if p.name != "exemplar")
        )
        report = discover(remaining)
        assert report.bellwether in {"alpha", "beta"}

    def test_needs_two_projects(self):
        community = planted_community(seed=1)
        with pytest.raises(ValueError, match="two projects"):
            discover(Community(community.projects[:1]))

    def test_unknown_measure_rejected(self):
        with pytest.raises(ValueError, match="quality measure"):
            discover(planted_community(seed=1), quality_measure="auc")

    def test_report_serializes(self):
        report = discover(planted_community(seed=2))
        doc = report.to_dict()
        assert doc["bellwether"] == "exemplar"
        assert set(doc["scores"]) == {"alpha", "beta", "exemplar"}


class TestBelltreePlan:
    def test_own_project_data_reproduces_the_local_planner(self):
        community = planted_community(seed=4)
        exemplar = community.get("exemplar")
        pooled = pool_versions(exemplar)
        local = XTreePlanner(seed=11).fit(pooled)
        for record in exemplar.versions[0].records[:20]:
            cross = belltree_plan(pooled, record, seed=11)
            own = local.plan(record)
            assert cross.actions == own.actions
            assert cross.expected_score_drop == own.expected_score_drop
            assert cross.source_planner == "belltree"

    def test_planner_factory_reuses_one_tree(self):
        community = planted_community(seed=4)
        planner = make_belltree_planner(community.get("exemplar"), seed=11)
        record = community.get("alpha").versions[0].records[0]
        assert planner.plan(record) == planner.plan(record)


def result_with(curve, reduced, increased):
    return KTestResult(
        project="p",
        version_i="1",
        version_j="2",
        version_k="3",
        planner="belltree",
        curve=curve,
        aupec_reduced=reduced,
        aupec_increased=increased,
        changes_per_plan=ChangesSummary.from_counts([1]),
        matched_classes=len(curve),
        matched_defects=10,
    )


class TestValidate:
    def _curve(self):
        return (CurvePoint(5.0, 3, 1, 2),)

    def test_clear_win_keeps_the_bellwether(self):
        outcome = result_with(self._curve(), reduced=59.0, increased=9.0)
        assert validate(None, outcome) == "keep"

    def test_tie_triggers_rediscovery(self):
        outcome = result_with(self._curve(), reduced=20.0, increased=20.0)
        assert validate(None, outcome) == "rediscover"

    def test_empty_curve_triggers_rediscovery(self):
        outcome = result_with((), reduced=None, increased=None)
        assert validate(None, outcome) == "rediscover"
