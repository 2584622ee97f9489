"""Exact osculating geometry of Fermat plane curves.

Tower-field arithmetic over Q(u, t) with u a primitive 2d-th root of unity
and t = 2^(1/d), homogeneous polynomial algebra, osculating conics and
sextactic points of x^d + y^d + z^d, the associated grid-line arrangements
with their singularity censuses and freeness tests, and exact verification
of the tangent/conic concurrency theorems.
"""

__version__ = "0.1.0"
