"""SNR_out, ASCI, beat segmentation and R-peak detection"""
