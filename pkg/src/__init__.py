"""
Road-map path planning engine and benchmark harness.

Dijkstra, A*, RRT*, RRT-Connect and an improved ant colony planner over
weighted pixel grids and 2.5D elevation terrain.
"""

__version__ = "0.1.0"
