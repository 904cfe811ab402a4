"""Test suite for the selfaug package."""
