"""Line graphs of del Pezzo surfaces and Hasse-principle failure search."""

__version__ = "0.1.0"
