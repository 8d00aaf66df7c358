#!/usr/bin/env python3
"""Main CLI entry point for hinf-delay: optimal controllers for delayed feedback plants."""

import click

from . import __version__
from .core.debug import configure_logging


@click.group()
@click.option('--debug', is_flag=True, help='Show debug logging and tracebacks')
@click.option('--threads', type=int, default=None, help='Worker threads for the gamma scan')
@click.version_option(version=__version__, prog_name='hinf-delay')
@click.pass_context
def cli(ctx, debug, threads):
    """hinf-delay - H-infinity mixed sensitivity design for P = R/(1 + e^{-hs}R).

    Synthesize the optimal controller, verify it against the raw closed loop
    and export the impulse response of its FIR block.
    """
    configure_logging(debug)
    ctx.ensure_object(dict)
    ctx.obj.update({
        'debug': debug,
        'threads': threads,
    })


def register_subcommands():
    """Register all subcommands."""
    from .clis.synthesize_cli import create_synthesize_command
    from .clis.verify_cli import create_verify_command
    from .clis.impulse_cli import create_impulse_command

    cli.add_command(create_synthesize_command(), name='synthesize')
    cli.add_command(create_verify_command(), name='verify')
    cli.add_command(create_impulse_command(), name='impulse')


register_subcommands()


if __name__ == '__main__':
    cli()
