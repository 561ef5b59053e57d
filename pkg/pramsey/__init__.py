import logging
import sys

logger = logging.getLogger(__name__)


def fatal(string, *args):
    sys.stderr.write('FATAL: ' + string.format(*args) + '\n')
    sys.exit(1)


def check_numpy():
    min_numpy = (1, 17)

    def parse_version(version):
        for e in version.split('.'):
            try:
                yield int(e)
            except ValueError:
                break

    try:
        import numpy
        # default_rng appeared in numpy 1.17
        if tuple(parse_version(numpy.__version__))[:2] < min_numpy:
            fatal('pramsey requires numpy>={0}, but only {1} is available',
                  '.'.join(map(str, min_numpy)), numpy.__version__)
    except ImportError:
        fatal('pramsey requires numpy>={0}', '.'.join(map(str, min_numpy)))


def main():
    check_numpy()
    from pramsey.ctl import ctl
    return ctl(prog_name='pramseyctl')
