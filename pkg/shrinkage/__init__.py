"""Wavelet coefficient thresholding and the SWT shrinkage denoisers"""
