# Planar-linkage kinematics and design toolkit for the Hoeckens underactuated finger

__version__ = "1.0.0"
