"""Numerical services: kernels, reduced dynamics, channels, phase space and oracles"""
