"""Transformer-encoder GAN for multi-channel time-series synthesis"""
__version__ = "0.1.0"
