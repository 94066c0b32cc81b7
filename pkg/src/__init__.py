"""
probgeo: location and dispersion in probability coordinates.
"""
