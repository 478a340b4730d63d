"""Signal representation, power measurement, SNR mixing and record IO"""
