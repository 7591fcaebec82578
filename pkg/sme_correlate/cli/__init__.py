"""
Command-line layer.
Parses flags into a RunConfig and dispatches to the command modules.
"""
