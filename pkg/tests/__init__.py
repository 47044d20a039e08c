"""Tests for tagmatch."""
