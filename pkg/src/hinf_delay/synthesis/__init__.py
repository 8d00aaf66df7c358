"""Factorization, gamma search, controller assembly and closed-loop checks."""
