"""
Command-line interface
"""

from src.cli.app import build_parser, main
