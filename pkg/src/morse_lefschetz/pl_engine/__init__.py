"""Discrete Morse data from triangulated surfaces with a vertex field."""
