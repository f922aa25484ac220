"""
Test suite for the AoT scheduler.
"""
