"""Test package for alphaz-fidelity."""
