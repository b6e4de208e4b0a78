"""
The quatspec command line: spectrum scans, Darboux pipelines, the
verification suite and mesh export, each driven by a JSON run
configuration.
"""

import argparse
import os
import sys

from ..utils import config
from ..utils.errors import (BranchPointOnGrid, InvalidConfig, NotImmersed,
                            QuatSpecException)
from . import cmd_darboux, cmd_export_mesh, cmd_spectrum, cmd_verify

COMMANDS = {
    'spectrum': cmd_spectrum,
    'darboux': cmd_darboux,
    'verify': cmd_verify,
    'export-mesh': cmd_export_mesh,
}

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INVALID_CONFIG = 2
EXIT_SOLVER_FAILURE = 3
EXIT_NOT_IMMERSED = 4


def add_args(argv=None):
    """
    Generate the ArgumentParser object for the CLI.
    """
    parser = argparse.ArgumentParser(description='Spectral curves and Darboux transforms of tori')
    parser.add_argument('command', choices=sorted(COMMANDS), help='The computation to run')
    parser.add_argument('--config', help='Location of the JSON run configuration')
    parser.add_argument('--out', default='.', help='Directory for the artifacts')
    parser.add_argument('--threads', type=int, help='Worker count, overrides the run configuration')
    parser.add_argument('--ini', help='Location of an ini file for logging and tolerances')

    args = parser.parse_args(argv)
    return args


def run(args):
    """
    Run one command and map library errors to exit codes.

    :returns: exit code
    """
    try:
        rc = config.load_run_config(args.config, args.command)
        if args.threads is not None:
            if args.threads < 1:
                raise InvalidConfig("--threads must be at least 1")
            rc.values['threads'] = args.threads
        os.makedirs(args.out, exist_ok=True)
        return COMMANDS[args.command].run(rc, args.out)
    except InvalidConfig as exc:
        print("Invalid configuration: {}".format(str(exc)), file=sys.stderr)
        return EXIT_INVALID_CONFIG
    except (BranchPointOnGrid, NotImmersed) as exc:
        print("Not an immersion at cell {}: {}".format(exc.location, str(exc)), file=sys.stderr)
        return EXIT_NOT_IMMERSED
    except QuatSpecException as exc:
        print("Solver failure: {}".format(str(exc)), file=sys.stderr)
        return EXIT_SOLVER_FAILURE


def main(argv=None):
    """
    Entry point of the ``quatspec`` command.
    """
    args = add_args(argv)
    config.set_config(args.ini)
    sys.exit(run(args))


if __name__ == "__main__":
    main()
