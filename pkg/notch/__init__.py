"""Reference notch filters: fixed Butterworth band-stop and the adaptive LMS notch"""
