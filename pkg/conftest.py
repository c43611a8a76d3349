"""pytest command line options and doctest flag definition/setup."""

import doctest
import re
import unittest.mock

APPROX = doctest.register_optionflag('APPROX')

APPROX_DIGITS = 6

_NUMBER = re.compile(r'-?\d+\.\d+(?:e[-+]?\d+)?')


def _round_numbers(text: str) -> str:
    return _NUMBER.sub(lambda m: f'{float(m.group()):.{APPROX_DIGITS}g}', text)

class ApproxChecker(doctest.OutputChecker):  # noqa: E302

    def check_output(self, want, got, optionflags, *args, **kwargs) -> bool:
        if optionflags & APPROX:
            want, got = _round_numbers(want), _round_numbers(got)
        return super().check_output(want, got, optionflags, *args, **kwargs)

unittest.mock.patch.object(doctest, 'OutputChecker', new=ApproxChecker).start()  # noqa: E305

import pytest  # noqa: E402

RUN_SLOW = '--run-slow'

ONLY_SLOW = '--only-slow'


def pytest_addoption(parser):
    parser.addoption(RUN_SLOW, action='store_true',
                     help='Also run tests with pytest.mark.slow.'
                          ' Run doctests with doctest_mark_slow().'
                          ' slow marks tests training models for many epochs.')

    parser.addoption(ONLY_SLOW, action='store_true',
                     help='Skip tests without pytest.mark.slow.'
                          ' Implies --run-slow.')


@pytest.fixture(autouse=True)
def doctests(pytestconfig, doctest_namespace):
    def doctest_mark_slow(*, reason=f'needs {RUN_SLOW}', **kwargs):
        return pytest.skip(reason, **kwargs)

    if pytestconfig.getoption(RUN_SLOW) or pytestconfig.getoption(ONLY_SLOW):
        def doctest_mark_slow(**kwargs):  # noqa: F811
            return None

    doctest_namespace.update(doctest_mark_slow=doctest_mark_slow)


@pytest.fixture(autouse=True)
def numpy_legacy_repr(request):
    """Doctest outputs use NumPy 1.x scalar reprs (``True`` not ``np.True_``)."""
    if not isinstance(request.node, pytest.DoctestItem):
        yield
        return
    import numpy as np

    with np.printoptions(legacy='1.25'):
        yield
