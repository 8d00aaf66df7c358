"""Test suite for hinf-delay."""
