"""Stationary (undecimated) wavelet transform and wavelet filter catalogue"""
