"""
Rigid-body hand models from hand skeletons, and projection of per-joint
SO(3) rotations onto their constrained joints.
"""

__version__ = "0.1.0"
