"""Networked micro-randomized trial lab.

Simulation, exact and mean-field truths, and estimators for direct and total
treatment effects under interference. Command-line entry points live in `main.py`.
"""
