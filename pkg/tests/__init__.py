"""
Tests for the SQDOpt simulation engine.
"""
