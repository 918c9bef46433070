"""Tests for polidna."""
