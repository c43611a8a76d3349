"""Command-line interface: ``hncf <command> [options]``."""

import dataclasses
import json
import logging
import pathlib
import sys
import typing

import click

from . import __version__
from . import _defaults
from . import exceptions
from .checkpoint import load_checkpoint, load_weights, save_checkpoint
from .checks import run_suite
from .config import load_run_config
from .data import (Dataset, generate_negatives, load_interactions, load_prepared,
                   preprocess_text, sample_fraction, split_train_test, synth_generate,
                   write_interactions, write_prepared)
from .data.ingest import VOCAB_FILE
from .encoders import read_vocab, write_vocab
from .evaluation import EvalProtocol, compare_variants, evaluate_model
from .inputs import ItemCatalog, RowEncoder
from .model import HncfModel, build_model, recommend_top_k
from .training import EpochMetrics, fit

__all__ = ['EXIT_OK', 'EXIT_USAGE', 'EXIT_DATA', 'EXIT_NUMERIC', 'INTERACTIONS_FILE',
           'cli', 'main']

EXIT_OK = 0

EXIT_USAGE = 1

EXIT_DATA = 2

EXIT_NUMERIC = 3

INTERACTIONS_FILE = 'interactions.csv'

LOG_FORMAT = '%(levelname)s %(name)s: %(message)s'

USAGE_ERRORS = (exceptions.InvalidConfig, exceptions.InvalidParam)

DATA_ERRORS = (exceptions.DataError, exceptions.CheckpointError,
               exceptions.EmptyDataset, exceptions.EmptyCases, exceptions.EmptyCorpus,
               exceptions.EmptyCandidates, exceptions.IndexOutOfRange,
               exceptions.MissingInput, exceptions.ShapeMismatch, OSError)

NUMERIC_ERRORS = (exceptions.NonFiniteGradient,)


log = logging.getLogger(__name__)


def _emit(doc: typing.Any) -> None:
    """Write ``doc`` as one JSON line to standard output."""
    click.echo(json.dumps(doc, sort_keys=True))


def _check_id_space(model: HncfModel, train: Dataset) -> None:
    users, items = model.config.user_cfg.vocab_size, model.config.item_cfg.vocab_size
    if (users, items) != (train.n_users, train.n_items):
        raise exceptions.DataError(f'checkpoint id space ({users} users, {items} items)'
                                   f' does not match the data ({train.n_users} users,'
                                   f' {train.n_items} items)')


@click.group(context_settings={'help_option_names': ['-h', '--help']})
@click.option('-v', '--verbose', count=True,
              help='Log INFO (-v) or DEBUG (-vv) messages to standard error.')
@click.version_option(__version__, prog_name='hncf')
def cli(verbose: int) -> None:
    """Train and evaluate hybrid neural collaborative filtering models."""
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


DATA_OPTION = click.option('--data', type=click.Path(exists=True, file_okay=False,
                                                      path_type=pathlib.Path),
                           help='Directory written by "hncf prepare".')

CONFIG_OPTION = click.option('--config', type=click.Path(exists=True, dir_okay=False),
                             default=None, help='RunConfig JSON file (defaults if omitted).')


@cli.command()
@CONFIG_OPTION
@click.option('--interactions', required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=pathlib.Path),
              help='Interactions CSV to ingest.')
@click.option('--out', required=True, type=click.Path(file_okay=False, path_type=pathlib.Path),
              help='Directory for train.csv, test.csv and vocab.txt.')
@click.option('--sample-fraction', 'fractions', type=float, multiple=True,
              help='Keep this fraction of the records (repeat to resample).')
@click.option('--neg-ratio', type=int, default=_defaults.NEG_RATIO, show_default=True,
              help='Generated negatives per positive.')
@click.option('--test-fraction', type=float, default=_defaults.TEST_FRACTION,
              show_default=True, help='Fraction of records held out as test.csv.')
@click.option('--max-vocab', type=int, default=None,
              help='Vocabulary ids including reserved ones [default: model.text.max_vocab].')
@click.option('--seed', type=int, default=None, help='Sampling seed.')
def prepare(config: typing.Optional[str], interactions: pathlib.Path, out: pathlib.Path,
            fractions: typing.Tuple[float, ...], neg_ratio: int,
            test_fraction: float, max_vocab: typing.Optional[int],
            seed: typing.Optional[int]) -> None:
    """Ingest, clean text, sample, add negatives, split, and write the vocabulary."""
    run = load_run_config(config)
    if max_vocab is not None:
        run = dataclasses.replace(run, model=dataclasses.replace(
            run.model, text=dataclasses.replace(run.model.text, max_vocab=max_vocab)))
    seed = _defaults.get_default_seed() if seed is None else seed
    dataset = load_interactions(interactions)
    dataset = dataset.derive(dataclasses.replace(r, features_text=preprocess_text(r.features_text))
                             for r in dataset)
    for fraction in fractions:
        dataset = sample_fraction(dataset, fraction, seed)
    dataset = generate_negatives(dataset, neg_ratio, seed)
    train, test = split_train_test(dataset, test_fraction, seed)

    vocab = run.build_vocab(r.features_text for r in train)
    paths = write_prepared(train, test, out)
    paths.append(write_vocab(vocab, out / VOCAB_FILE))
    _emit({'files': paths, 'train': train.summary(), 'test': test.summary(),
           'vocabulary': len(vocab)})


def _load_training_data(data: typing.Optional[pathlib.Path],
                        config_directory: typing.Optional[str]):
    directory = data if data is not None else config_directory
    if directory is None:
        raise click.UsageError('no data directory: pass --data or set data.directory')
    train, test = load_prepared(directory)
    vocab = read_vocab(pathlib.Path(directory) / VOCAB_FILE)
    return train, test, vocab


@cli.command()
@CONFIG_OPTION
@DATA_OPTION
@click.option('--out', required=True, type=click.Path(dir_okay=False),
              help='Checkpoint file to write.')
@click.option('--init-weights', type=click.Path(exists=True, dir_okay=False), default=None,
              help='Checkpoint or .npz archive with initial weights.')
@click.option('--init-prefix', default='', help='Only initialize parameters with this prefix.')
def train(config: typing.Optional[str], data: typing.Optional[pathlib.Path], out: str,
          init_weights: typing.Optional[str], init_prefix: str) -> None:
    """Fit a model and write its checkpoint (one JSON line per epoch)."""
    run = load_run_config(config)
    train_set, _, vocab = _load_training_data(data, run.data_directory)
    vocab = run.cap_vocab(vocab)
    model = build_model(run.model_config(vocab, n_users=train_set.n_users,
                                         n_items=train_set.n_items))
    if init_weights is not None:
        load_weights(model, init_weights, prefix=init_prefix)

    def on_epoch(metrics: EpochMetrics) -> None:
        _emit(metrics.to_json())

    fit(model, train_set, run.train, on_epoch=on_epoch)
    save_checkpoint(model, out)


@cli.command()
@click.option('--ckpt', required=True, type=click.Path(exists=True, dir_okay=False))
@DATA_OPTION
@click.option('--k', type=int, default=_defaults.K, show_default=True)
@click.option('--negatives', type=int, default=_defaults.N_NEGATIVES, show_default=True)
@click.option('--threshold', type=float, default=_defaults.THRESHOLD, show_default=True)
@click.option('--seed', type=int, default=None, help='Negative sampling seed.')
def evaluate(ckpt: str, data: typing.Optional[pathlib.Path], k: int, negatives: int,
             threshold: float, seed: typing.Optional[int]) -> None:
    """Print recall and Hit Ratio @ K of a checkpoint on the test split."""
    model = load_checkpoint(ckpt)
    train_set, test_set, _ = _load_training_data(data, None)
    _check_id_space(model, train_set)
    protocol = EvalProtocol(k=k, n_negatives=negatives, threshold=threshold,
                            seed=_defaults.get_default_seed() if seed is None else seed)
    report = evaluate_model(model, test_set, protocol, history=[train_set],
                            encoder=RowEncoder.for_model(model.config, train_set),
                            catalog=ItemCatalog.from_datasets(train_set, test_set))
    _emit(report.to_json())


@cli.command()
@click.option('--ckpt', required=True, type=click.Path(exists=True, dir_okay=False))
@DATA_OPTION
@click.option('--user', 'user_id', required=True, type=int, help='Raw user id.')
@click.option('--k', type=int, default=_defaults.K, show_default=True)
@click.option('--include-seen', is_flag=True,
              help='Also rank items the user already interacted with.')
def recommend(ckpt: str, data: typing.Optional[pathlib.Path], user_id: int, k: int,
              include_seen: bool) -> None:
    """Print the top-k items for a user as JSON list."""
    model = load_checkpoint(ckpt)
    train_set, test_set, _ = _load_training_data(data, None)
    _check_id_space(model, train_set)
    encoder = RowEncoder.for_model(model.config, train_set)
    catalog = ItemCatalog.from_datasets(train_set, test_set)

    user = encoder.user(user_id)
    seen = set() if include_seen else train_set.positives_by_user().get(user_id, set())
    items = [i for i in catalog.items() if catalog[i].raw_id not in seen]
    candidates = [encoder.encode_candidate(user, item, catalog) for item in items]
    ranked = recommend_top_k(model, user, candidates, k)
    _emit([{'item_id': catalog[item].raw_id, 'score': score} for item, score in ranked])


@cli.command()
@click.option('--seed', type=int, default=0, show_default=True)
def gradcheck(seed: int) -> int:
    """Run the gradient check suite (exit 3 on failure)."""
    results = run_suite(seed)
    for r in results:
        _emit({'check': r.name, 'error': r.error, 'passed': r.passed})
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERIC


@cli.command()
@click.option('--out', required=True, type=click.Path(file_okay=False, path_type=pathlib.Path))
@click.option('--users', type=int, required=True)
@click.option('--items', type=int, required=True)
@click.option('--seed', type=int, default=None)
@click.option('--pairs-per-user', type=int, default=10, show_default=True)
def synth(out: pathlib.Path, users: int, items: int, seed: typing.Optional[int],
          pairs_per_user: int) -> None:
    """Write a synthetic two-topic fixture (interactions.csv and images/)."""
    dataset, images = synth_generate(users, items, seed, directory=out,
                                     pairs_per_user=pairs_per_user)
    path = write_interactions(dataset, out / INTERACTIONS_FILE)
    _emit({'interactions': path, 'images': len(images), **dataset.summary()})


@cli.command()
@DATA_OPTION
def stats(data: typing.Optional[pathlib.Path]) -> None:
    """Print the summary counts of the train and test split."""
    train_set, test_set, _ = _load_training_data(data, None)
    _emit({'train': train_set.summary(), 'test': test_set.summary()})


@cli.command()
@CONFIG_OPTION
@DATA_OPTION
def compare(config: typing.Optional[str], data: typing.Optional[pathlib.Path]) -> None:
    """Train and evaluate NCF, TEXT_NCF, and HYBRID on the same split."""
    run = load_run_config(config)
    train_set, test_set, vocab = _load_training_data(data, run.data_directory)
    vocab = run.cap_vocab(vocab)
    base = run.model_config(vocab, n_users=train_set.n_users, n_items=train_set.n_items)
    reports = compare_variants(base, train_set, test_set, run.train, run.eval)
    for variant, report in reports.items():
        _emit({'variant': variant.value, **report.to_json()})


def main(argv: typing.Optional[typing.Sequence[str]] = None) -> int:
    """Run the command line ``argv`` and return the exit code."""
    try:
        result = cli.main(args=list(argv) if argv is not None else None, prog_name='hncf',
                          standalone_mode=False)
    except click.UsageError as e:
        if e.ctx is not None:
            click.echo(e.ctx.get_help(), err=True)
        click.echo(f'Error: {e.format_message()}', err=True)
        return EXIT_USAGE
    except click.Abort:
        return EXIT_USAGE
    except USAGE_ERRORS as e:
        click.echo(f'Error: {e}', err=True)
        return EXIT_USAGE
    except NUMERIC_ERRORS as e:
        click.echo(f'Error: {e}', err=True)
        return EXIT_NUMERIC
    except DATA_ERRORS as e:
        if isinstance(e, OSError) and not isinstance(e, FileNotFoundError):
            log.debug('I/O error', exc_info=True)
        click.echo(f'Error: {e}', err=True)
        return EXIT_DATA
    return result if isinstance(result, int) else EXIT_OK
