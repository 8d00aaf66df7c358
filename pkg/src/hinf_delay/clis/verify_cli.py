#!/usr/bin/env python3
"""CLI for checking a controller file against the raw closed loop."""

import click
from .cli_core import build_run_config, handle_error, plant_options, print_table


def create_verify_command():
    """Create and return the verify command."""
    @click.command('verify')
    @click.argument('controller', type=click.Path(dir_okay=False))
    @plant_options
    @click.pass_context
    def verify(ctx, controller, **options):
        """Evaluate the achieved mixed-sensitivity norm of CONTROLLER.

        Plant and weights default to the ones stored in the controller file.
        Writes report.json and stacked_magnitude.csv; exits 2 when the
        achieved norm misses gamma_opt by more than the tolerance.
        """
        from ..session import DesignSession, load_controller
        from ..synthesis.verification import require_within_tolerance
        try:
            loaded, stored = load_controller(controller)
            session = DesignSession.from_controller(loaded, build_run_config(ctx, stored, **options))
            session.write_verification()
            report = session.report
            print_table({
                "gamma_opt": report.gamma_opt,
                "achieved_norm": report.achieved_norm,
                "relative_error": report.relative_error,
                "omega_peak": report.omega_peak,
                "flatness_deviation": report.flatness_deviation,
                "q1_bound": report.q1_bound,
                "q1_removable_residual": report.q1_removable_residual,
                **{f"identity[{name}]": value for name, value in report.identity_residuals.items()},
            }, title="Closed-loop report")
            require_within_tolerance(report)
            click.echo(click.style("Achieved norm matches gamma_opt.", fg="green"))
        except Exception as e:
            ctx.exit(handle_error(ctx, e))

    return verify
