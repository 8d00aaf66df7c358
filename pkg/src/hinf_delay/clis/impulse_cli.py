#!/usr/bin/env python3
"""CLI for sampling the impulse response of the FIR block."""

import click
from .cli_core import build_run_config, handle_error


def create_impulse_command():
    """Create and return the impulse command."""
    @click.command('impulse')
    @click.argument('controller', type=click.Path(dir_okay=False))
    @click.option('--t-max', type=float, default=1.5, show_default=True, help='End of the sampled window (s)')
    @click.option('--dt', type=float, default=1e-3, show_default=True, help='Sample spacing (s)')
    @click.option('--output-dir', '-o', type=click.Path(file_okay=False), default=None,
                  help='Directory for impulse.csv (default: current directory)')
    @click.pass_context
    def impulse(ctx, controller, t_max, dt, output_dir):
        """Write the impulse response of A(s) + B(s)e^{-hs} for CONTROLLER."""
        from ..session import DesignSession, load_controller
        try:
            loaded, stored = load_controller(controller)
            session = DesignSession.from_controller(loaded, build_run_config(ctx, stored, output_dir=output_dir))
            path = session.write_impulse(t_max, dt)
            click.echo(f"impulse trace: {path}")
            click.echo(f"finite_support_residual = {session.finite_support_residual:.3e}")
        except Exception as e:
            ctx.exit(handle_error(ctx, e))

    return impulse
