"""Tests for lpdual_lab."""
