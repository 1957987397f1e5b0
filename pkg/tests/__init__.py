"""Tests for riq."""
