"""Toolkit for the planning engine."""
