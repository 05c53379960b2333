# Settings package

