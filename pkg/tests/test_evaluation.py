import dataclasses
import logging
import warnings

import numpy as np
import pytest

from hncf import exceptions
from hncf.checks import tiny_config
from hncf.config import RunConfig
from hncf.data import Dataset, InteractionRecord, split_train_test, synth_generate
from hncf.encoders import IdEmbeddingConfig
from hncf.evaluation import (ConfusionCounts, EvalProtocol, LeaveOneOutCase, MetricReport,
                             ModelScorer, build_leave_one_out, compare_variants, confusion,
                             evaluate_model, hit_ratio_at_k, recall_metric)
from hncf.inputs import ItemCatalog, RowEncoder
from hncf.model import ModelVariant, build_model
from hncf.training import TrainConfig

import _common


def sized(cfg, dataset):
    return dataclasses.replace(cfg, user_cfg=IdEmbeddingConfig(dataset.n_users, 4),
                               item_cfg=IdEmbeddingConfig(dataset.n_items, 4))


class TableScorer:
    """Score items from a fixed ``{(user, item): score}`` table (default 0)."""

    def __init__(self, table=None, default=0.0):
        self.table = dict(table or {})
        self.default = default
        self.calls = []

    def score(self, user, items):
        self.calls.append((user, tuple(items)))
        return [self.table.get((user, item), self.default) for item in items]


class ItemScorer:

    def score(self, user, items):
        return [float(item) for item in items]


@pytest.mark.parametrize('kwargs', [{'k': 0}, {'n_negatives': 0},
                                    {'threshold': 0.0}, {'threshold': 1.0}])
def test_protocol_invalid(kwargs):
    with pytest.raises(exceptions.InvalidConfig):
        EvalProtocol(**kwargs)


def test_confusion_threshold_is_inclusive():
    assert confusion([0.5, 0.49, 0.7, 0.1], [1, 1, 0, 0], 0.5) == ConfusionCounts(
        true_positive=1, false_negative=1, true_negative=1, false_positive=1)


def test_confusion_invalid():
    with pytest.raises(exceptions.ShapeMismatch):
        confusion([0.5], [1, 0])
    with pytest.raises(exceptions.InvalidParam):
        confusion([0.5], [2])


def test_recall_metric():
    counts = ConfusionCounts(true_positive=18, false_negative=7, true_negative=3,
                             false_positive=2)

    assert recall_metric(counts) == pytest.approx(0.72)
    assert counts.total == 30


def test_recall_metric_without_positives():
    with pytest.warns(exceptions.DegenerateDenominatorWarning, match=r'zero positives'):
        assert recall_metric(ConfusionCounts(true_negative=4)) == 0.0


def test_hit_ratio_at_k():
    cases = [LeaveOneOutCase(0, positive=5, negatives=(1, 2, 3)),
             LeaveOneOutCase(1, positive=1, negatives=(2, 3, 4))]

    assert hit_ratio_at_k(ItemScorer(), cases, k=1) == (1, 2, 0.5)
    assert hit_ratio_at_k(ItemScorer(), cases, k=4) == (2, 2, 1.0)


def test_hit_ratio_at_k_ties_favor_lower_item():
    scorer = TableScorer()
    cases = [LeaveOneOutCase(0, positive=2, negatives=(1, 3)),
             LeaveOneOutCase(1, positive=0, negatives=(1, 3))]

    assert hit_ratio_at_k(scorer, cases, k=1) == (1, 2, 0.5)
    assert scorer.calls == [(0, (2, 1, 3)), (1, (0, 1, 3))]


def test_hit_ratio_at_k_invalid():
    with pytest.raises(exceptions.EmptyCases):
        hit_ratio_at_k(ItemScorer(), [], k=10)
    with pytest.raises(exceptions.InvalidParam):
        hit_ratio_at_k(ItemScorer(), [LeaveOneOutCase(0, 1, (2,))], k=0)


def test_hit_ratio_at_k_score_count_mismatch(mocker):
    scorer = mocker.Mock(**{'score.return_value': [0.5]})
    with pytest.raises(exceptions.ShapeMismatch):
        hit_ratio_at_k(scorer, [LeaveOneOutCase(0, 1, (2,))])


def test_build_leave_one_out_holds_out_latest_positive():
    dataset = Dataset([InteractionRecord(1, 10, 1, timestamp=5),
                       InteractionRecord(1, 30, 1, timestamp=2),
                       InteractionRecord(1, 20, 0, timestamp=9),
                       InteractionRecord(2, 30, 1),
                       InteractionRecord(2, 10, 1)]
                      + [InteractionRecord(3, i, 0) for i in range(40, 50)])

    cases = build_leave_one_out(dataset, EvalProtocol(n_negatives=5, seed=1))

    assert [(c.user, c.positive) for c in cases] == [(0, dataset.item_index[10]),
                                                     (1, dataset.item_index[30])]
    for case in cases:
        assert len(set(case.negatives)) == 5
        assert dataset.item_index[10] not in case.negatives
        assert case.positive not in case.negatives


def test_build_leave_one_out_excludes_history_positives():
    train = Dataset(_common.records_of((1, 1, 1), (1, 2, 1), (2, 3, 1), (2, 4, 0)))
    test = train.derive(_common.records_of((1, 3, 1)))

    cases = build_leave_one_out(test, EvalProtocol(n_negatives=1, seed=0), history=[train])

    assert cases == [LeaveOneOutCase(0, positive=2, negatives=(3,))]


def test_build_leave_one_out_skips_users_without_candidates(caplog):
    dataset = Dataset(_common.records_of((1, 1, 1), (1, 2, 1), (2, 1, 1)))

    with caplog.at_level(logging.WARNING, logger='hncf.evaluation'):
        cases = build_leave_one_out(dataset, EvalProtocol(n_negatives=1))

    assert cases == [LeaveOneOutCase(1, positive=0, negatives=(1,))]
    assert 'skipped 1 of 2 users' in caplog.text


def test_build_leave_one_out_is_seeded():
    dataset = Dataset(_common.records_of(*[(u, i, int(i == u)) for u in range(4)
                                           for i in range(30)]))
    protocol = EvalProtocol(n_negatives=10, seed=3)

    assert build_leave_one_out(dataset, protocol) == build_leave_one_out(dataset, protocol)
    assert build_leave_one_out(dataset, protocol) != build_leave_one_out(dataset, protocol,
                                                                         seed=4)


def test_build_leave_one_out_empty():
    with pytest.raises(exceptions.EmptyDataset):
        build_leave_one_out(Dataset([]), EvalProtocol())


def test_evaluate_model_with_scorer():
    dataset = Dataset(_common.records_of((1, 1, 1), (1, 2, 0), (1, 3, 0), (2, 2, 1), (2, 3, 0)))
    scorer = TableScorer({(0, 0): 0.9, (0, 1): 0.2, (1, 0): 0.9, (1, 1): 0.4, (1, 2): 0.8})

    report = evaluate_model(scorer, dataset, EvalProtocol(k=1, n_negatives=1, seed=0))

    assert report.confusion == ConfusionCounts(true_positive=1, false_negative=1,
                                               true_negative=2, false_positive=1)
    assert report.recall == 0.5
    assert (report.hits, report.users_evaluated, report.hit_ratio_at_k) == (1, 2, 0.5)
    assert report.to_json() == {'recall': 0.5, 'hit_ratio_at_k': 0.5, 'k': 1, 'hits': 1,
                                'users_evaluated': 2, 'tp': 1, 'fn': 1, 'tn': 2, 'fp': 1}


def test_evaluate_model_with_model(synthetic):
    model = build_model(sized(tiny_config(ModelVariant.TEXT_NCF), synthetic))

    with warnings.catch_warnings():
        warnings.simplefilter('ignore', exceptions.DegenerateDenominatorWarning)
        report = evaluate_model(model, synthetic, EvalProtocol(k=2, n_negatives=1, seed=0))

    assert isinstance(report, MetricReport)
    assert report.confusion.total == len(synthetic)
    assert 0.0 <= report.hit_ratio_at_k <= 1.0
    assert 0.0 <= report.recall <= 1.0


def test_model_scorer_uses_predict_batch(mocker, synthetic):
    cfg = tiny_config(ModelVariant.NCF)
    encoder = RowEncoder.for_model(cfg, synthetic)
    catalog = ItemCatalog.from_datasets(synthetic)
    predict = mocker.patch('hncf.evaluation.predict_batch', autospec=True,
                           return_value=[0.1, 0.2])
    scorer = ModelScorer(mocker.sentinel.model, encoder, catalog)

    assert scorer.score(1, catalog.items()[:2]) == [0.1, 0.2]
    (model, rows), _ = predict.call_args
    assert model is mocker.sentinel.model
    assert [(r.user, r.item) for r in rows] == [(1, catalog.items()[0]), (1, catalog.items()[1])]


def test_evaluate_model_empty():
    with pytest.raises(exceptions.EmptyDataset):
        evaluate_model(ItemScorer(), Dataset([]))


def test_compare_variants_trains_each_variant(mocker, synthetic):
    base = sized(tiny_config(ModelVariant.NCF), synthetic)
    fit = mocker.patch('hncf.training.fit', autospec=True)
    report = mocker.create_autospec(MetricReport, instance=True)
    evaluate = mocker.patch('hncf.evaluation.evaluate_model', autospec=True,
                            return_value=report)

    reports = compare_variants(base, synthetic, synthetic, TrainConfig(epochs=1))

    assert list(reports) == list(ModelVariant)
    assert all(r is report for r in reports.values())
    assert [call.args[0].config.variant for call in fit.call_args_list] == list(ModelVariant)
    assert evaluate.call_count == 3


def count_confusion(predictions, labels, threshold):
    counts = {'true_positive': 0, 'false_negative': 0,
              'true_negative': 0, 'false_positive': 0}
    for p, y in zip(predictions, labels):
        if y == 1:
            counts['true_positive' if p >= threshold else 'false_negative'] += 1
        else:
            counts['false_positive' if p >= threshold else 'true_negative'] += 1
    return ConfusionCounts(**counts)


def count_hits(score_table, cases, k):
    hits = 0
    for case in cases:
        items = [case.positive, *case.negatives]
        ranked = sorted(items, key=lambda item: (-score_table[case.user, item], item))
        hits += case.positive in ranked[:k]
    return hits


def random_cases(rng, n_items=30):
    cases = []
    for user in range(int(rng.integers(1, 12))):
        items = rng.choice(n_items, size=int(rng.integers(2, 12)), replace=False)
        cases.append(LeaveOneOutCase(user, positive=int(items[0]),
                                     negatives=tuple(int(i) for i in items[1:])))
    return cases


@pytest.mark.parametrize('seed', range(50))
def test_confusion_and_recall_match_counting(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 40))
    predictions = (rng.integers(0, 5, size=n) / 4).tolist()
    labels = rng.integers(0, 2, size=n).tolist()
    threshold = float(rng.choice([0.25, 0.5, 0.75]))

    counts = confusion(predictions, labels, threshold)

    assert counts == count_confusion(predictions, labels, threshold)
    positives = counts.true_positive + counts.false_negative
    if positives:
        assert recall_metric(counts) == counts.true_positive / positives


@pytest.mark.parametrize('seed', range(50))
def test_hit_ratio_at_k_matches_sorting(seed):
    rng = np.random.default_rng(seed)
    cases = random_cases(rng)
    # coarse scores make ties common
    table = {(c.user, item): float(rng.integers(0, 4))
             for c in cases for item in (c.positive, *c.negatives)}
    scorer = TableScorer(table)

    ratios = []
    for k in range(1, 13):
        hits, users, ratio = hit_ratio_at_k(scorer, cases, k)
        assert (hits, users) == (count_hits(table, cases, k), len(cases))
        ratios.append(ratio)

    assert ratios == sorted(ratios)
    assert ratios[-1] == 1.0


@pytest.mark.parametrize('seed', range(10))
def test_build_leave_one_out_default_protocol(seed):
    rng = np.random.default_rng(seed)
    n_items = 150
    records = [InteractionRecord(0, item, 0) for item in range(n_items)]
    for user in range(1, int(rng.integers(3, 10))):
        items = rng.choice(n_items, size=int(rng.integers(2, 30)), replace=False)
        records += [InteractionRecord(user, int(item), int(rng.integers(0, 2)),
                                      timestamp=int(rng.integers(0, 100)))
                    for item in items]
    dataset = Dataset(records)
    train_rows, test_rows = records[:len(records) // 2], records[len(records) // 2:]
    train, test = dataset.derive(train_rows), dataset.derive(test_rows)
    history = {}
    for source in (train, test):
        for user, items in source.positives_by_user().items():
            history.setdefault(source.user_index[user], set()).update(
                source.item_index[i] for i in items)

    cases = build_leave_one_out(test, EvalProtocol(seed=seed), history=[train])

    users_with_positives = {test.user_index[u] for u in test.positives_by_user()}
    assert sorted(c.user for c in cases) == sorted(users_with_positives)
    for case in cases:
        assert len(case.negatives) == 99
        assert len(set(case.negatives)) == 99
        assert case.positive in history[case.user]
        assert history[case.user].isdisjoint(case.negatives)


@pytest.mark.slow(reason='trains three variants on five seeds')
def test_compare_variants_content_signal_raises_hit_ratio(tmp_path):
    hit_ratios = {variant: [] for variant in ModelVariant}
    for seed in range(5):
        data, _ = synth_generate(100, 100, seed=seed, directory=tmp_path / f'seed{seed}',
                                 image_shape=(16, 16, 3))
        train, test = split_train_test(data, 0.2, seed=seed)
        run = RunConfig.from_dict({
            'seed': seed,
            'data': {'image_shape': [16, 16, 3]},
            'model': {'text': {'layers': 1, 'hidden': 16, 'max_len': 8},
                      'image': {'blocks': [[4, 1]], 'head_dim': 8},
                      'fusion_widths': [32, 16]},
            'train': {'epochs': 10, 'validation_split': 0.0},
            'eval': {'k': 10, 'n_negatives': 50}})
        vocab = run.build_vocab(r.features_text for r in train)
        base = run.model_config(vocab, n_users=data.n_users, n_items=data.n_items)

        reports = compare_variants(base, train, test, run.train, run.eval)

        for variant, report in reports.items():
            hit_ratios[variant].append(report.hit_ratio_at_k)

    mean = {variant: np.mean(values) for variant, values in hit_ratios.items()}
    assert mean[ModelVariant.HYBRID] >= mean[ModelVariant.NCF] + 0.05, mean
    assert mean[ModelVariant.TEXT_NCF] >= mean[ModelVariant.NCF], mean
