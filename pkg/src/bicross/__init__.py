"""Exact computational algebra for matched pairs of groups and their bicrossproduct Hopf algebras."""
