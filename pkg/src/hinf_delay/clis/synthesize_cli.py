#!/usr/bin/env python3
"""CLI for running the gamma search and writing the optimal controller."""

import click
from .cli_core import build_run_config, handle_error, plant_options


def create_synthesize_command():
    """Create and return the synthesize command."""
    @click.command('synthesize')
    @plant_options
    @click.pass_context
    def synthesize(ctx, **options):
        """Compute gamma_opt and the optimal controller for a plant.

        Writes controller.json, gamma_scan.csv and summary.txt to the
        output directory.
        """
        from ..session import DesignSession
        try:
            session = DesignSession(build_run_config(ctx, **options))
            paths = session.write_synthesis()
            click.echo(session.summary_text(), nl=False)
            for kind, path in paths.items():
                click.echo(f"   {kind}: {path}")
        except Exception as e:
            ctx.exit(handle_error(ctx, e))

    return synthesize
