"""Transfer function evaluation, configuration and logging setup."""
