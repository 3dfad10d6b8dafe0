"""Tests for PRD Testing Phase 1."""
