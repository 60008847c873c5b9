"""Unit test package for influence_toolbox."""
