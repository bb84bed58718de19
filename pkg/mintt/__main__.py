from mintt.cli import cli

cli()
