"""
CLI commands module.
One module per subcommand, each exposing run(config) -> exit code.
"""
