"""CLI implementations for the hinf-delay package."""
