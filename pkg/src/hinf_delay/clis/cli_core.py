#!/usr/bin/env python3
import json
import os
import sys
import traceback
from typing import Any, Dict, Optional, Union

import click
from rich.console import Console
from rich.table import Table

from hinf_delay.core.config import RunConfig, load_config_file
from hinf_delay.utils.errors import (
    ArtifactError, BaseError, ConfigurationError, EvaluationError, SynthesisError, VerificationError,
)

EXIT_INVALID = 1
EXIT_SYNTHESIS = 2
EXIT_IO = 3
EXIT_POLE_HIT = 4

# Flag name -> flat configuration key
_FLAG_KEYS = {
    "k": "k", "a": "a", "b": "b", "h": "h",
    "rho": "rho", "alpha": "alpha", "beta": "beta",
    "omega_min": "omega_min", "omega_max": "omega_max",
    "grid_points": "grid_points", "scan_points": "scan_points",
    "tolerance": "norm_tolerance", "output_dir": "output_dir",
}


def build_run_config(ctx, stored: Optional[Dict[str, Any]] = None, **flags) -> RunConfig:
    """Merge defaults < values stored with a controller < config file < flags."""
    values: Dict[str, Any] = dict(stored or {})
    config_file = flags.pop("config_file", None)
    if config_file:
        values.update(load_config_file(config_file))
    values.update({_FLAG_KEYS[name]: value for name, value in flags.items()
                   if name in _FLAG_KEYS and value is not None})
    if ctx.obj.get("threads") is not None:
        values["threads"] = ctx.obj["threads"]
    return RunConfig.from_mapping(values)


def exit_code_for(error: Exception) -> int:
    """Exit code table shared by all commands."""
    if isinstance(error, ConfigurationError):
        return EXIT_INVALID
    if isinstance(error, (SynthesisError, VerificationError)):
        return EXIT_SYNTHESIS
    if isinstance(error, ArtifactError):
        return EXIT_IO
    if isinstance(error, EvaluationError):
        return EXIT_POLE_HIT
    return EXIT_INVALID


def show_debug_info(ctx, error=None):
    """Dump the run context, the error fields and the active traceback to stderr."""
    details = {
        "command": ctx.info_name,
        "threads": ctx.obj.get("threads"),
        "error": error.to_dict() if isinstance(error, BaseError)
        else {"type": type(error).__name__, "message": str(error)},
    }
    click.secho("\nDebug Information:", fg='blue', err=True)
    click.echo(format_json(details), err=True)

    if sys.exc_info()[2] is not None:
        click.secho("\nFull Traceback:", fg='red', err=True)
        click.echo(traceback.format_exc(), err=True)


def format_error_message(error: Union[Exception, BaseError]) -> tuple[str, str]:
    """Format error message and determine color based on error type."""
    error_messages = {
        # Configuration Errors
        "invalid_plant_params": (
            "Invalid plant parameters: {message}\n"
            "The plant family requires k > 1, a > b > 0 and h > 0."
        ),
        "invalid_weights": (
            "Invalid weights: {message}\n"
            "The weights require rho, alpha, beta > 0 and alpha*beta < 1."
        ),
        "invalid_grid": "Invalid frequency grid: {message}",
        "invalid_config": "Invalid configuration: {message}",
        "invalid_time_window": "Invalid time window: {message}",
        # Synthesis Errors
        "no_singular_gamma": (
            "No optimal gamma found.\n"
            "{message}\n"
            "Try a denser scan with --scan-points or check the weights."
        ),
        "out_of_interval": "Gamma outside the admissible interval: {message}",
        "degenerate_l": "Degenerate null vector: {message}",
        "repeated_denominator_roots": "Impulse expansion failed: {message}",
        # Verification Errors
        "tolerance_exceeded": (
            "Closed-loop check failed.\n"
            "{message}"
        ),
        # Evaluation Errors
        "pole_hit": (
            "Evaluation hit a pole: {message}\n"
            "For the closed loop this is evidence of instability on the imaginary axis."
        ),
        # Artifact Errors
        "read_failed": "Cannot read input: {message}",
        "write_failed": "Cannot write output: {message}",
        "parse_failed": "Cannot parse input: {message}",
    }

    if not isinstance(error, BaseError):
        return f"Internal Error: {str(error)}", 'red'

    template = error_messages.get(error.code, f"{error.code}: {{message}}")
    message = template.format(message=error.message)
    color = 'yellow' if isinstance(error, (ConfigurationError, VerificationError)) else 'red'
    return message, color


def handle_error(ctx, error: Exception, show_prefix: bool = True) -> int:
    """Report any error consistently and return its exit code."""
    message, color = format_error_message(error)
    if show_prefix:
        message = f"Error: {message}"

    click.secho(message, fg=color, err=True)

    if ctx.obj.get('debug'):
        show_debug_info(ctx, error)

    return exit_code_for(error)


def print_table(rows: Dict[str, Any], title: Optional[str] = None) -> None:
    """Two-column key/value table on stdout."""
    table = Table(title=title)
    table.add_column("quantity")
    table.add_column("value")
    for key, value in rows.items():
        table.add_row(key, f"{value:.6g}" if isinstance(value, float) else str(value))
    Console().print(table)


_VALUE_COLORS = (
    (lambda v: v.startswith('"'), 'green'),
    (lambda v: v in ('true', 'false'), 'yellow'),
    (lambda v: v in ('null', 'NaN', 'Infinity', '-Infinity'), 'magenta'),
    (lambda v: _is_number(v), 'cyan'),
)


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def format_json(data: dict, indent: int = 2) -> str:
    """Render ``data`` as indented JSON; keys and scalar values are colored unless HINF_DELAY_COLOR=false."""
    text = json.dumps(data, indent=indent, default=str)
    if os.getenv('HINF_DELAY_COLOR') == 'false':
        return text

    lines = []
    for line in text.splitlines():
        key, sep, value = line.partition(': ')
        if not sep:
            lines.append(line)
            continue
        bare = value.rstrip(',')
        color = next((c for match, c in _VALUE_COLORS if match(bare)), None)
        styled = click.style(bare, fg=color) + value[len(bare):] if color else value
        lines.append(f"{click.style(key, fg='blue')}: {styled}")
    return '\n'.join(lines)


def plant_options(f):
    """Plant, weight and grid options shared by synthesize and verify."""
    for name, help_text in reversed((
        ("k", "Plant gain k (> 1)"),
        ("a", "Plant zero a (> b)"),
        ("b", "Plant pole b (> 0)"),
        ("h", "Delay h in seconds (> 0)"),
        ("rho", "Sensitivity weight W1 = rho"),
        ("alpha", "Complementary weight W2 = (1 + alpha s)/(beta + s): alpha"),
        ("beta", "Complementary weight W2 = (1 + alpha s)/(beta + s): beta"),
    )):
        f = click.option(f'--{name}', type=float, default=None, help=help_text)(f)
    f = click.option('--omega-min', type=float, default=None, help='Lowest grid frequency (rad/s)')(f)
    f = click.option('--omega-max', type=float, default=None, help='Highest grid frequency (rad/s)')(f)
    f = click.option('--grid-points', type=int, default=None, help='Base frequency grid size')(f)
    f = click.option('--scan-points', type=int, default=None, help='Number of gamma scan samples')(f)
    f = click.option('--tolerance', type=float, default=None,
                     help='Relative tolerance on the achieved norm (default 0.01)')(f)
    f = click.option('--config', 'config_file', type=click.Path(dir_okay=False), default=None,
                     help='Flat "key = value" configuration file; flags override it')(f)
    f = click.option('--output-dir', '-o', type=click.Path(file_okay=False), default=None,
                     help='Directory for written artifacts (default: current directory)')(f)
    return f
