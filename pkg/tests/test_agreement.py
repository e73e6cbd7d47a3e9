import math

import numpy as np
import pytest

from cutaway.agreement import (
    AgreementSummary,
    AnnotatedInsertion,
    EditSet,
    broll_stats,
    coverage_bins,
    jaccard,
    load_edit_sets,
    mean_pairwise_jaccard,
    n_bins,
    probability_track,
    query_locality,
    query_tokens,
    random_baseline_jaccard,
    random_pair_jaccard,
    read_edit_sets,
    save_edit_sets,
)
from cutaway.errors import (
    EditSetFormatError,
    TimeOutOfRangeError,
    VideoMismatchError,
)
from cutaway.transcript import load_transcript

from conftest import FIXTURES, make_transcript


def _edit(video_id, spans, editor_id=None):
    return EditSet(
        video_id=video_id,
        insertions=tuple(
            AnnotatedInsertion(s, d, q[0] if q else "")
            for s, d, *q in sorted(spans)
        ),
        editor_id=editor_id,
    )


class TestValidation:
    def test_negative_start_rejected(self):
        with pytest.raises(EditSetFormatError):
            AnnotatedInsertion(-0.1, 1.0)

    @pytest.mark.parametrize("duration", [0.4, 8.5, 0.0])
    def test_duration_bounds(self, duration):
        with pytest.raises(EditSetFormatError):
            AnnotatedInsertion(1.0, duration)

    def test_boundary_durations_accepted(self):
        AnnotatedInsertion(0.0, 0.5)
        AnnotatedInsertion(0.0, 8.0)

    def test_unsorted_insertions_rejected(self):
        with pytest.raises(EditSetFormatError):
            EditSet("v", (AnnotatedInsertion(5.0, 1.0), AnnotatedInsertion(1.0, 1.0)))

    def test_from_dict_sorts(self):
        es = EditSet.from_dict({
            "video_id": "v",
            "insertions": [
                {"start_s": 5.0, "duration_s": 1.0},
                {"start_s": 1.0, "duration_s": 1.0},
            ],
        })
        assert [ins.start_s for ins in es.insertions] == [1.0, 5.0]

    def test_check_in_video(self):
        es = _edit("v", [(9.5, 1.0)])
        es.check_in_video(10.5)
        with pytest.raises(TimeOutOfRangeError):
            es.check_in_video(10.0)

    def test_io_roundtrip(self, tmp_path):
        sets = [_edit("v", [(1.0, 2.0, "coffee")], editor_id="e1"),
                _edit("v", [], editor_id="e2")]
        path = tmp_path / "sets.json"
        save_edit_sets(sets, path)
        assert read_edit_sets(path) == sets

    def test_corpus_must_be_list(self):
        with pytest.raises(EditSetFormatError):
            load_edit_sets("{}")


class TestBins:
    def test_n_bins(self):
        assert n_bins(30.0, 0.1) == 300
        assert n_bins(3.05, 0.1) == 31
        assert n_bins(0.001, 0.1) == 1

    def test_float_division_does_not_overshoot(self):
        # 3.3 / 0.1 lands just below 33 in floats; the guard keeps 33 bins
        assert n_bins(3.3, 0.1) == 33

    def test_coverage_hand_case(self):
        es = _edit("v", [(0.0, 2.0), (5.0, 2.0)])
        cov = coverage_bins(es, 10.0, bin_s=1.0)
        assert list(np.flatnonzero(cov)) == [0, 1, 5, 6]

    def test_touching_boundary_does_not_bleed(self):
        cov = coverage_bins(_edit("v", [(1.0, 1.0)]), 4.0, bin_s=1.0)
        assert list(np.flatnonzero(cov)) == [1]

    def test_partial_overlap_counts(self):
        cov = coverage_bins(_edit("v", [(0.95, 0.5)]), 2.0, bin_s=1.0)
        assert list(np.flatnonzero(cov)) == [0, 1]


class TestJaccard:
    def test_hand_case(self):
        a = _edit("v", [(0.0, 2.0), (5.0, 2.0)])  # bins {0,1,5,6}
        b = _edit("v", [(1.0, 2.0)])              # bins {1,2}
        assert jaccard(a, b, 10.0, bin_s=1.0) == pytest.approx(0.2)

    def test_reflexive(self):
        a = _edit("v", [(0.6, 1.4), (7.25, 2.5)])
        assert jaccard(a, a, 12.0) == 1.0

    def test_both_empty(self):
        assert jaccard(_edit("v", []), _edit("v", []), 10.0) == 1.0

    def test_one_empty(self):
        assert jaccard(_edit("v", [(1.0, 1.0)]), _edit("v", []), 10.0) == 0.0

    def test_video_mismatch(self):
        with pytest.raises(VideoMismatchError):
            jaccard(_edit("a", []), _edit("b", []), 10.0)

    def test_matches_predicate_oracle_on_random_pairs(self):
        """Each bin's coverage is re-derived from the raw interval-overlap
        predicate; that enumeration must agree exactly with coverage_bins."""
        rng = np.random.default_rng(123)
        video, bin_s = 30.0, 0.1
        nb = n_bins(video, bin_s)

        def random_set():
            spans = []
            for _ in range(int(rng.integers(1, 5))):
                dur = int(rng.integers(10, 161)) * 0.05
                start = int(rng.integers(0, int((video - dur) / 0.05) + 1)) * 0.05
                spans.append((start, dur))
            return _edit("v", spans)

        def oracle_bins(es):
            return {
                k for k in range(nb)
                if any(ins.start_s < (k + 1) * bin_s - 1e-9
                       and ins.end_s > k * bin_s + 1e-9
                       for ins in es.insertions)
            }

        for _ in range(50):
            a, b = random_set(), random_set()
            ca, cb = oracle_bins(a), oracle_bins(b)
            union = len(ca | cb)
            expected = 1.0 if union == 0 else len(ca & cb) / union
            got = jaccard(a, b, video, bin_s)
            assert got == expected
            assert got == jaccard(b, a, video, bin_s)
            assert 0.0 <= got <= 1.0


class TestMeanPairwise:
    def test_brute_force_pairs(self):
        sets = [
            _edit("v", [(0.0, 2.0)]),
            _edit("v", [(1.0, 2.0)]),
            _edit("v", [(0.0, 1.0), (2.0, 1.0)]),
            _edit("v", []),
        ]
        values = [
            jaccard(sets[i], sets[j], 10.0, bin_s=1.0)
            for i in range(4) for j in range(i + 1, 4)
        ]
        summary = mean_pairwise_jaccard(sets, 10.0, bin_s=1.0)
        assert summary.n_pairs == 6
        assert summary.mean == pytest.approx(np.mean(values))
        assert summary.sd == pytest.approx(np.std(values))

    def test_single_pair_sd_zero(self):
        sets = [_edit("v", [(0.0, 2.0)]), _edit("v", [(1.0, 2.0)])]
        summary = mean_pairwise_jaccard(sets, 10.0)
        assert summary.n_pairs == 1
        assert summary.sd == 0.0

    def test_needs_two(self):
        with pytest.raises(ValueError):
            mean_pairwise_jaccard([_edit("v", [])], 10.0)


def _rejection_mc(dur_a, dur_b, video, trials, seed, bin_s):
    """Independent baseline estimator: rejection-sample non-overlapping
    placements, derive coverage from the raw overlap predicate."""
    rng = np.random.default_rng(seed)
    nb = int(math.ceil(video / bin_s - 1e-9))

    def place(durs):
        durs = np.asarray(durs, dtype=np.float64)
        while True:
            starts = rng.random(durs.shape[0]) * (video - durs)
            ivs = sorted(zip(starts.tolist(), durs.tolist()))
            if all(ivs[i][0] + ivs[i][1] <= ivs[i + 1][0]
                   for i in range(len(ivs) - 1)):
                return ivs

    total = 0.0
    for _ in range(trials):
        cov = []
        for ivs in (place(dur_a), place(dur_b)):
            cov.append([
                any(s < (k + 1) * bin_s - 1e-9 and s + d > k * bin_s + 1e-9
                    for s, d in ivs)
                for k in range(nb)
            ])
        inter = sum(1 for x, y in zip(*cov) if x and y)
        union = sum(1 for x, y in zip(*cov) if x or y)
        total += 1.0 if union == 0 else inter / union
    return total / trials


class TestRandomBaseline:
    def test_agrees_with_rejection_sampling(self):
        ours = random_pair_jaccard([2.0, 1.0], [1.5], 10.0,
                                   trials=3000, seed=42, bin_s=0.5)
        oracle = _rejection_mc([2.0, 1.0], [1.5], 10.0, 3000, 99, 0.5)
        assert ours == pytest.approx(oracle, abs=0.02)

    def test_deterministic_per_seed(self):
        a = random_pair_jaccard([2.0], [1.0], 15.0, trials=500, seed=7)
        b = random_pair_jaccard([2.0], [1.0], 15.0, trials=500, seed=7)
        c = random_pair_jaccard([2.0], [1.0], 15.0, trials=500, seed=8)
        assert a == b
        assert a != c

    def test_full_coverage_scores_one(self):
        assert random_pair_jaccard([4.0, 6.0], [5.0, 5.0], 10.0,
                                   trials=50, seed=0) == 1.0

    def test_sparse_in_huge_video_scores_near_zero(self):
        j = random_pair_jaccard([0.5], [0.5], 10_000.0, trials=200, seed=0)
        assert j < 0.01

    def test_oversized_rejected(self):
        with pytest.raises(TimeOutOfRangeError):
            random_pair_jaccard([8.0, 8.0], [1.0], 10.0, trials=10)

    def test_matched_per_pair(self):
        sets = [
            _edit("v", [(0.0, 2.0)]),
            _edit("v", [(3.0, 2.0)]),
            _edit("v", [(5.0, 1.0)]),
        ]
        summary = random_baseline_jaccard(sets, 20.0, trials=200, seed=3)
        assert isinstance(summary, AgreementSummary)
        assert summary.n_pairs == 3
        assert 0.0 <= summary.mean <= 1.0
        again = random_baseline_jaccard(sets, 20.0, trials=200, seed=3)
        assert summary == again


class TestProbabilityTrack:
    def test_hand_counts(self):
        sets = [
            _edit("v", [(0.0, 2.0)], "e1"),
            _edit("v", [(1.0, 2.0)], "e2"),
            _edit("v", [(1.0, 1.0)], "e3"),
        ]
        track = probability_track(sets, 10.0, bin_s=1.0)
        assert track.n_edits == 3
        assert len(track.values) == 10
        assert track.values[0] == pytest.approx(1 / 3)
        assert track.values[1] == pytest.approx(1.0)
        assert track.values[2] == pytest.approx(1 / 3)
        assert all(v == 0.0 for v in track.values[3:])

    def test_mass_equals_mean_covered_time(self):
        # all spans on bin edges, so the identity is exact
        sets = [
            _edit("v", [(0.0, 2.0)]),
            _edit("v", [(1.0, 2.0)]),
            _edit("v", [(4.0, 1.0)]),
        ]
        track = probability_track(sets, 10.0, bin_s=1.0)
        mean_covered = np.mean([2.0, 2.0, 1.0])
        assert float(track.values.sum()) * 1.0 == pytest.approx(mean_covered)

    def test_values_bounded(self):
        sets = [_edit("v", [(0.25, 3.3)]), _edit("v", [(2.0, 4.0)])]
        track = probability_track(sets, 12.0)
        assert track.values.min() >= 0.0
        assert track.values.max() <= 1.0

    def test_needs_one(self):
        with pytest.raises(ValueError):
            probability_track([], 10.0)


class TestBRollStats:
    def _corpus(self):
        return [
            _edit("v1", [(0.0, 2.0), (11.0, 2.0)], "e1"),
            _edit("v1", [(5.0, 0.5)], "e2"),
            _edit("v2", [(1.0, 8.0)], "e3"),
        ], {"v1": 20.0, "v2": 10.0}

    def test_recount(self):
        sets, durations = self._corpus()
        stats = broll_stats(sets, durations)
        assert stats.n_edit_sets == 3
        assert stats.n_insertions == 4
        assert stats.median_duration_s == pytest.approx(2.0)
        assert stats.median_gap_s == pytest.approx(9.0)  # 11.0 - 2.0
        assert stats.mean_replaced_fraction == pytest.approx(
            (4 / 20 + 0.5 / 20 + 8 / 10) / 3
        )
        assert stats.median_count == 1.0

    def test_histogram_buckets(self):
        sets, durations = self._corpus()
        hist = broll_stats(sets, durations).duration_histogram
        assert hist["0-1"] == 1   # the 0.5s insertion
        assert hist["2-3"] == 2
        assert hist["7-8"] == 1   # the full 8.0s insertion
        assert sum(hist.values()) == 4
        assert len(hist) == 8

    def test_no_gaps_is_none(self):
        stats = broll_stats([_edit("v1", [(0.0, 1.0)])], {"v1": 10.0})
        assert stats.median_gap_s is None

    def test_missing_video_duration(self):
        with pytest.raises(VideoMismatchError):
            broll_stats([_edit("vx", [(0.0, 1.0)])], {"v1": 10.0})

    def test_to_dict_roundtrips_json(self):
        import json
        sets, durations = self._corpus()
        doc = broll_stats(sets, durations).to_dict()
        assert json.loads(json.dumps(doc)) == doc


class TestQueryLocality:
    def test_tokens(self):
        assert query_tokens("Coffee Beans!") == ["coffee", "beans"]
        assert query_tokens("  ") == []

    def test_hand_fixture(self):
        # words: alpha beta gamma delta; beta spans [0.70, 1.05)
        doc = make_transcript("alpha beta gamma delta", video_id="v")
        sets = [_edit("v", [
            (0.7, 1.0, "beta"),         # spoken at the insertion point
            (0.7, 1.0, "delta"),        # spoken 0.9s later at 1.60 -> in radius
            (0.0, 1.0, "delta"),        # delta starts 1.60s away -> out
            (0.3, 1.0, "missing"),      # never spoken
        ])]
        assert query_locality(sets, {"v": doc}, radius_s=1.0) == pytest.approx(0.5)

    def test_multiword_contiguous_rule(self):
        doc = make_transcript("pour coffee beans slowly", video_id="v")
        transcripts = {"v": doc}
        local = _edit("v", [(0.7, 1.0, "coffee beans")])
        reversed_q = _edit("v", [(0.7, 1.0, "beans coffee")])
        assert query_locality([local], transcripts) == 1.0
        assert query_locality([reversed_q], transcripts) == 0.0

    def test_empty_query_is_nonlocal(self):
        doc = make_transcript("alpha beta", video_id="v")
        sets = [_edit("v", [(0.3, 1.0, "")])]
        assert query_locality(sets, {"v": doc}) == 0.0

    def test_missing_transcript(self):
        with pytest.raises(VideoMismatchError):
            query_locality([_edit("v", [(0.0, 1.0, "x")])], {})

    def test_fixture_corpus(self):
        doc = load_transcript(FIXTURES / "vlog.transcript.json")
        sets = read_edit_sets(FIXTURES / "editors.editset.json")
        assert query_locality(sets, {"vlog": doc}) == pytest.approx(6 / 7)
