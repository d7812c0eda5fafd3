"""Threat-free Nash equilibria for finite extensive games, with toy protocol instances."""
