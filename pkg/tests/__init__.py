"""
Test suite for the road-map planners and benchmark harness
"""
